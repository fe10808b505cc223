#pragma once

#include <stdexcept>
#include <string>

namespace prl {

// Every failure raised by the library derives from Error.  InputError means the
// caller supplied something invalid; PrecisionError means the requested answer
// cannot be certified at the working precision or truncation.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class PrecisionError : public Error {
 public:
  using Error::Error;
};

#define PRL_DEFINE_ERROR(Name, Base)   \
  class Name : public Base {           \
   public:                             \
    using Base::Base;                  \
  };

PRL_DEFINE_ERROR(NonUnitInverse, InputError)
PRL_DEFINE_ERROR(ContextMismatch, InputError)
PRL_DEFINE_ERROR(NonTopologicallyNilpotentSubstitution, InputError)
PRL_DEFINE_ERROR(CocycleInvalid, InputError)
PRL_DEFINE_ERROR(PreconditionFailed, InputError)
PRL_DEFINE_ERROR(MalformedSpec, InputError)
PRL_DEFINE_ERROR(OutOfRange, InputError)
PRL_DEFINE_ERROR(SeedNotFinite, InputError)
PRL_DEFINE_ERROR(IndeterminateAtPole, InputError)
PRL_DEFINE_ERROR(ConfigMismatch, InputError)
PRL_DEFINE_ERROR(SampleExhausted, InputError)
PRL_DEFINE_ERROR(NonUnitConstantTerm, InputError)
PRL_DEFINE_ERROR(InsufficientPrefix, InputError)

PRL_DEFINE_ERROR(PrecisionInsufficient, PrecisionError)
PRL_DEFINE_ERROR(TruncationInsufficient, PrecisionError)
PRL_DEFINE_ERROR(InternalConsistency, PrecisionError)

#undef PRL_DEFINE_ERROR

// Raised by the divided-power audit: the coordinate of index `index` of a
// substituted divided power is not p-integral.
class IntegralityFailure : public PrecisionError {
 public:
  IntegralityFailure(std::string variable, int index)
      : PrecisionError("integrality failure: divided power " + std::to_string(index) +
                       " of the image of '" + variable + "' is not integral"),
        variable_(std::move(variable)),
        index_(index) {}

  const std::string& variable() const { return variable_; }
  int index() const { return index_; }

 private:
  std::string variable_;
  int index_;
};

}  // namespace prl
