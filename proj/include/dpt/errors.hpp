#pragma once

#include <stdexcept>
#include <string>

namespace dpt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DPT_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                    \
   public:                                                       \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  };

DPT_DEFINE_ERROR(SentinelInInput)
DPT_DEFINE_ERROR(OutOfRange)
DPT_DEFINE_ERROR(Unbalanced)
DPT_DEFINE_ERROR(NotOpen)
DPT_DEFINE_ERROR(NoSuchChild)
DPT_DEFINE_ERROR(MalformedLcp)
DPT_DEFINE_ERROR(PatternTooLong)
DPT_DEFINE_ERROR(EmptyPattern)
DPT_DEFINE_ERROR(DeliveryToInvalidPe)
DPT_DEFINE_ERROR(FetchOutOfSlice)
DPT_DEFINE_ERROR(LocalityViolation)
DPT_DEFINE_ERROR(FormatError)
DPT_DEFINE_ERROR(IoError)

#undef DPT_DEFINE_ERROR

}  // namespace dpt
