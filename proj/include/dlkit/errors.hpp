#pragma once
#include <stdexcept>
#include <string>

namespace dlkit {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define DLKIT_ERROR(Name, Base)            \
    class Name : public Base {             \
    public:                                \
        using Base::Base;                  \
    };

DLKIT_ERROR(DomainError, Error)
DLKIT_ERROR(CollisionError, DomainError)
DLKIT_ERROR(ValidationError, Error)
DLKIT_ERROR(RegimeError, Error)
DLKIT_ERROR(UnsupportedRegime, Error)
DLKIT_ERROR(NumericFailure, Error)
DLKIT_ERROR(StepRejected, NumericFailure)
DLKIT_ERROR(EigenFailure, NumericFailure)
DLKIT_ERROR(SizeMismatch, Error)
DLKIT_ERROR(NonUniformWeights, Error)
DLKIT_ERROR(EmptySample, Error)
DLKIT_ERROR(UnnormalizedReference, Error)
DLKIT_ERROR(IoError, Error)
DLKIT_ERROR(SerializationError, IoError)

#undef DLKIT_ERROR

class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int column);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

}
