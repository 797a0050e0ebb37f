#pragma once

#include <stdexcept>
#include <string>

namespace bhd {

// Base for all domain errors. name() is the stable identifier the CLI prints.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(what), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

#define BHD_DEFINE_ERROR(Type)                                       \
    class Type : public Error {                                      \
    public:                                                          \
        explicit Type(const std::string& what) : Error(#Type, what) {} \
    }

BHD_DEFINE_ERROR(InvalidParams);
BHD_DEFINE_ERROR(PreconditionViolation);
BHD_DEFINE_ERROR(NotSteadyState);
BHD_DEFINE_ERROR(NoConvergence);
BHD_DEFINE_ERROR(SingularResolvent);
BHD_DEFINE_ERROR(FilterOverlap);
BHD_DEFINE_ERROR(TruncationError);
BHD_DEFINE_ERROR(SolveFailure);
BHD_DEFINE_ERROR(FitDiverged);
BHD_DEFINE_ERROR(UnphysicalCovariance);
BHD_DEFINE_ERROR(InsufficientSamples);
BHD_DEFINE_ERROR(MissingMoment);

#undef BHD_DEFINE_ERROR

}  // namespace bhd
