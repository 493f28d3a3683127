#include "branchkit/error.hpp"

namespace branchkit {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroOrderJet: return "ZeroOrderJet";
    case ErrorCode::OrderTooLow: return "OrderTooLow";
    case ErrorCode::NotDivisible: return "NotDivisible";
    case ErrorCode::NonExtendable: return "NonExtendable";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::NotClosedForm: return "NotClosedForm";
    case ErrorCode::SolverDiverged: return "SolverDiverged";
    case ErrorCode::IllConditionedFit: return "IllConditionedFit";
    case ErrorCode::ConstraintViolated: return "ConstraintViolated";
    case ErrorCode::NotDiffeoGerm: return "NotDiffeoGerm";
    case ErrorCode::BuildRejected: return "BuildRejected";
    case ErrorCode::NotABranchPoint: return "NotABranchPoint";
    case ErrorCode::AmbientFrameMismatch: return "AmbientFrameMismatch";
    case ErrorCode::NonRealL: return "NonRealL";
    case ErrorCode::QuasiBoundViolated: return "QuasiBoundViolated";
    case ErrorCode::NotConformal: return "NotConformal";
    case ErrorCode::RootBranchAmbiguous: return "RootBranchAmbiguous";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DenominatorVanishing: return "DenominatorVanishing";
    case ErrorCode::MetricDegenerate: return "MetricDegenerate";
    case ErrorCode::SingularNode: return "SingularNode";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

}  // namespace branchkit
