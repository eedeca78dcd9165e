#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lagflow {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid grid data (non-finite value, bad shape). Carries the flat node index when known.
class GridError : public Error {
 public:
  GridError(const std::string& what, std::size_t node = npos) : Error(what), node_(node) {}
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t node() const { return node_; }

 private:
  std::size_t node_;
};

/// Induced metric lost positive definiteness at a node.
class SingularGraphError : public Error {
 public:
  SingularGraphError(std::size_t node, const std::string& what) : Error(what), node_(node) {}
  std::size_t node() const { return node_; }

 private:
  std::size_t node_;
};

/// Tangent planes left the slope cone of the chart; the flow must stop.
class SlopeViolation : public Error {
 public:
  SlopeViolation(std::size_t node, double slope, double hessian_norm, double limit)
      : Error("slope condition violated at node " + std::to_string(node) + ": slope " +
              std::to_string(slope) + " >= " + std::to_string(limit) + " (|D2phi| = " +
              std::to_string(hessian_norm) + ")"),
        node_(node), slope_(slope), hessian_norm_(hessian_norm) {}
  std::size_t node() const { return node_; }
  double slope() const { return slope_; }
  double hessian_norm() const { return hessian_norm_; }

 private:
  std::size_t node_;
  double slope_;
  double hessian_norm_;
};

class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

/// Second fundamental form (or curvature) crossed the blow-up threshold.
class BlowupDetected : public Error {
 public:
  BlowupDetected(double time, double sup)
      : Error("blow-up detected at t = " + std::to_string(time) + " (sup|A| = " +
              std::to_string(sup) + ")"),
        time_(time), sup_(sup) {}
  double time() const { return time_; }
  double sup() const { return sup_; }

 private:
  double time_;
  double sup_;
};

class DegenerateCurve : public Error {
 public:
  using Error::Error;
};

}  // namespace lagflow
