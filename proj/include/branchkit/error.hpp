#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace branchkit {

enum class ErrorCode {
  ZeroOrderJet,
  OrderTooLow,
  NotDivisible,
  NonExtendable,
  GridTooCoarse,
  NotClosedForm,
  SolverDiverged,
  IllConditionedFit,
  ConstraintViolated,
  NotDiffeoGerm,
  BuildRejected,
  NotABranchPoint,
  AmbientFrameMismatch,
  NonRealL,
  QuasiBoundViolated,
  NotConformal,
  RootBranchAmbiguous,
  NewtonDiverged,
  ShapeMismatch,
  RankDeficient,
  DenominatorVanishing,
  MetricDegenerate,
  SingularNode,
  InvalidInput,
};

const char* error_code_name(ErrorCode code);

// Exception carrying a machine-readable code. Detail values are JSON literals
// (numbers, strings with quotes, arrays) keyed by field name.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::map<std::string, std::string> detail = {})
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  ErrorCode code() const { return code_; }
  const std::map<std::string, std::string>& detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::map<std::string, std::string> detail_;
};

}  // namespace branchkit
