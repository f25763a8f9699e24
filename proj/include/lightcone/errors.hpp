#pragma once

#include <stdexcept>
#include <string>

namespace lightcone {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class GeometryFault { chart_breakdown, radial_point, degenerate_speed, off_cone, non_finite };

const char* to_string(GeometryFault f);

// Raised by any per-node geometric precondition. node < 0 when not tied to a sample.
class GeometryError : public Error {
public:
  GeometryError(GeometryFault fault, long node, const std::string& what);
  GeometryFault fault() const { return fault_; }
  long node() const { return node_; }

private:
  GeometryFault fault_;
  long node_;
};

class GridMismatch : public Error {
public:
  using Error::Error;
};

// Maurer-Cartan matrix off the expected shape. projection=true means it failed
// to be an algebra element at all, false means it is off the sparsity pattern.
class PatternViolation : public Error {
public:
  PatternViolation(bool projection, double defect, const std::string& what)
      : Error(what), projection_(projection), defect_(defect) {}
  bool projection_defect() const { return projection_; }
  double defect() const { return defect_; }

private:
  bool projection_;
  double defect_;
};

class SchemaError : public Error {
public:
  using Error::Error;
};

enum class GuardKind { stability, blowup };

class GuardError : public Error {
public:
  GuardError(GuardKind kind, double time, const std::string& what)
      : Error(what), kind_(kind), time_(time) {}
  GuardKind kind() const { return kind_; }
  double time() const { return time_; }

private:
  GuardKind kind_;
  double time_;
};

enum class CalibrationFault { inconsistent, insufficient, missing, stale };

class CalibrationError : public Error {
public:
  CalibrationError(CalibrationFault fault, const std::string& what) : Error(what), fault_(fault) {}
  CalibrationFault fault() const { return fault_; }

private:
  CalibrationFault fault_;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace lightcone
