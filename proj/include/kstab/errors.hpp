#pragma once

#include <stdexcept>
#include <string>

namespace kstab {

// Process exit codes used by the CLI; every error maps onto one of them.
enum class ErrorClass : int { Parse = 1, MathDomain = 2, Mismatch = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
  ErrorClass error_class() const noexcept { return cls_; }
  int exit_code() const noexcept { return static_cast<int>(cls_); }

 private:
  ErrorClass cls_;
};

#define KSTAB_DEFINE_ERROR(Name, Cls)                                               \
  class Name : public Error {                                                       \
   public:                                                                          \
    explicit Name(const std::string& what) : Error(ErrorClass::Cls, #Name ": " + what) {} \
  };

KSTAB_DEFINE_ERROR(ParseError, Parse)
KSTAB_DEFINE_ERROR(CaseFileMissing, Parse)
KSTAB_DEFINE_ERROR(UnknownPoint, Parse)
KSTAB_DEFINE_ERROR(DegenerateBody, MathDomain)
KSTAB_DEFINE_ERROR(NoBracket, MathDomain)
KSTAB_DEFINE_ERROR(NotPseudoEffective, MathDomain)
KSTAB_DEFINE_ERROR(SingularGram, MathDomain)
KSTAB_DEFINE_ERROR(WallDetectionFailure, MathDomain)
KSTAB_DEFINE_ERROR(MissingIncidence, MathDomain)
KSTAB_DEFINE_ERROR(OutsideRegion, MathDomain)
KSTAB_DEFINE_ERROR(ValueMismatch, Mismatch)
KSTAB_DEFINE_ERROR(IrrationalPoint, MathDomain)
KSTAB_DEFINE_ERROR(UnclassifiedDecomposition, MathDomain)

#undef KSTAB_DEFINE_ERROR

}  // namespace kstab
