#pragma once

#include <stdexcept>
#include <string>

namespace tgp {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define TGP_ERROR(Name)                                             \
  struct Name : Error {                                             \
    explicit Name(const std::string& msg = #Name) : Error(msg) {}   \
  }

// graph-core
TGP_ERROR(IndexOutOfRange);
TGP_ERROR(NonFiniteWeight);
TGP_ERROR(FeatureShapeMismatch);
TGP_ERROR(FeatureWidthMismatch);
TGP_ERROR(AsymmetricInput);
TGP_ERROR(UnknownReduce);
TGP_ERROR(EmptyGraphInBatch);
TGP_ERROR(ParseError);
TGP_ERROR(IoError);

// selectors
TGP_ERROR(NonFiniteScore);
TGP_ERROR(NonFinite);
TGP_ERROR(PowerIterationNoConvergence);
TGP_ERROR(NoConvergence);
TGP_ERROR(UnreachableNode);
TGP_ERROR(GraphTooLarge);
TGP_ERROR(InvalidConfig);

// rcl
TGP_ERROR(EmptyCluster);
TGP_ERROR(SingularEliminationBlock);
TGP_ERROR(IncompatibleConnector);

// objectives / solver
TGP_ERROR(ZeroDegreeTrace);
TGP_ERROR(ZeroEdges);
TGP_ERROR(UnknownLoss);

// pipeline
TGP_ERROR(StaleCache);
TGP_ERROR(CorruptRecord);
TGP_ERROR(MissingRecord);

// metrics
TGP_ERROR(LengthMismatch);

// cli
TGP_ERROR(InvalidProbability);
TGP_ERROR(MissingLabels);

#undef TGP_ERROR

}  // namespace tgp
