#ifndef NODALFORMS_ERRORS_HPP
#define NODALFORMS_ERRORS_HPP

#include <stdexcept>

namespace nodalforms {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidMatrix : public Error { public: using Error::Error; };
class NoConvergence : public Error { public: using Error::Error; };
class NotPositiveDefinite : public Error { public: using Error::Error; };
class DimensionError : public Error { public: using Error::Error; };
class InvalidGraph : public Error { public: using Error::Error; };
class EmptySubset : public Error { public: using Error::Error; };
class ZeroVector : public Error { public: using Error::Error; };
class PreconditionError : public Error { public: using Error::Error; };
class HypothesisNotMet : public Error { public: using Error::Error; };
class SizeLimit : public Error { public: using Error::Error; };
class IndexError : public Error { public: using Error::Error; };
class EmptyDomain : public Error { public: using Error::Error; };

/// Input file does not match its schema. `line` is 1-based, 0 when unknown.
class SchemaError : public Error {
public:
    SchemaError(const std::string& what, int line = 0) : Error(what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

} // namespace nodalforms

#endif
