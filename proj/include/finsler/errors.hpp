#pragma once

#include <stdexcept>
#include <string>

namespace finsler {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define FINSLER_DEFINE_ERROR(Name)                                  \
  struct Name : Error {                                             \
    explicit Name(const std::string& what = #Name) : Error(what) {} \
  }

FINSLER_DEFINE_ERROR(OutsideChart);
FINSLER_DEFINE_ERROR(ZeroVector);
FINSLER_DEFINE_ERROR(NotPositiveDefinite);
FINSLER_DEFINE_ERROR(SingularTensor);
FINSLER_DEFINE_ERROR(DegenerateFlag);
FINSLER_DEFINE_ERROR(ZeroReference);
FINSLER_DEFINE_ERROR(QuadratureFailure);
FINSLER_DEFINE_ERROR(NewtonDivergence);
FINSLER_DEFINE_ERROR(VanishingGradient);
FINSLER_DEFINE_ERROR(StepFailure);
FINSLER_DEFINE_ERROR(NotASpaceForm);
FINSLER_DEFINE_ERROR(NotANormal);
FINSLER_DEFINE_ERROR(BackwardUnsupported);
FINSLER_DEFINE_ERROR(IrregularPoint);
FINSLER_DEFINE_ERROR(EigenFailure);
FINSLER_DEFINE_ERROR(NotTangent);
FINSLER_DEFINE_ERROR(NotOrthogonal);
FINSLER_DEFINE_ERROR(FocalSingularity);
FINSLER_DEFINE_ERROR(DuplicateCurvature);
FINSLER_DEFINE_ERROR(NotPositiveCurvature);
FINSLER_DEFINE_ERROR(RankEstimationFailure);
FINSLER_DEFINE_ERROR(NotKilling);
FINSLER_DEFINE_ERROR(NavigationDomainViolation);
FINSLER_DEFINE_ERROR(ParseError);
FINSLER_DEFINE_ERROR(SchemaError);
FINSLER_DEFINE_ERROR(UnknownCatalogId);
FINSLER_DEFINE_ERROR(IoError);

#undef FINSLER_DEFINE_ERROR

// Geodesic left the chart; carries the parameter at which it exited.
struct PathExitsChart : Error {
  double exit_parameter;
  explicit PathExitsChart(double s)
      : Error("PathExitsChart at s=" + std::to_string(s)), exit_parameter(s) {}
};

}  // namespace finsler
