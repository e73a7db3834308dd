#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace ifc {

/// Interpolation rule between samples. Diffusive paths (Z, X) are piecewise
/// linear; counting paths (M, ebar) are piecewise constant.
enum class Interp { Linear, Step };

/// Sampled cadlag path on [0, T]: strictly increasing times starting at 0,
/// one value per time (the right limit), plus an explicit jump registry
/// holding the left limit at flagged discontinuities. Immutable once built.
class CadlagPath {
 public:
  CadlagPath() = default;

  CadlagPath(std::vector<double> times, std::vector<double> values,
             Interp interp = Interp::Linear);

  /// Full constructor with an explicit jump registry. jump_indices index into
  /// `times`; left_values are the matching left limits. For Step paths every
  /// sample-to-sample change is a discontinuity, so any unflagged change is
  /// added to the registry automatically.
  CadlagPath(std::vector<double> times, std::vector<double> values,
             Interp interp, std::vector<std::size_t> jump_indices,
             std::vector<double> jump_left_values);

  static CadlagPath constant(double value, double horizon);

  std::size_t size() const { return times_.size(); }
  double horizon() const { return times_.back(); }
  Interp interp() const { return interp_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }

  bool is_jump(std::size_t i) const { return jump_flag_[i] != 0; }
  /// Left limit at sample i (equals the value when i is not a flagged jump
  /// and the path is continuous there).
  double left_value(std::size_t i) const;
  std::size_t jump_count() const;

  /// Right-continuous evaluation; throws std::domain_error outside [0, T].
  double evaluate(double t) const;
  /// Left limit f(t-); f(0-) is taken as f(0) unless a jump is flagged at 0.
  double evaluate_left(double t) const;

  /// Copy with the terminal value replaced by the left limit at T, mirroring
  /// the hat operator that makes paths left-continuous at the horizon.
  CadlagPath hat() const;

 private:
  void validate() const;
  std::size_t segment_index(double t) const;

  std::vector<double> times_;
  std::vector<double> values_;
  std::vector<double> left_values_;   // aligned with times_
  std::vector<unsigned char> jump_flag_;
  Interp interp_ = Interp::Linear;
};

/// Parametric representation of a completed graph: (u[p], r[p]) traces the
/// graph left to right, r non-decreasing from 0 to T, jumps appearing as
/// maximal parameter intervals of constant r.
struct ParametricRepresentation {
  std::vector<double> u;
  std::vector<double> r;
};

/// M_t = floor((sup_{s<=t} z_s)_+) as a Step path. Jump times are exact for
/// Linear input (crossings are solved on each segment), so the output grid
/// is the input grid plus interior crossing times.
CadlagPath counting_map(const CadlagPath& z);

/// M1 oscillation w_T(f, t, delta): sup over t1<t2<t3 in the delta-window of
/// the distance from f(t2) to the segment [f(t1), f(t3)]. Computed over the
/// sample grid (plus left limits at jumps and the window endpoints), which is
/// exact for piecewise-linear/step paths whose breakpoints are grid points.
double oscillation_w(const CadlagPath& f, double t, double delta);

/// Maximal variation v_T(f, t, delta) = sup |f(t1) - f(t2)| over the window.
double oscillation_v(const CadlagPath& f, double t, double delta);

/// Canonical parametric representation with roughly `resolution` points,
/// knots of the completed graph always included.
ParametricRepresentation build_parametric(const CadlagPath& f,
                                          std::size_t resolution);

/// Upper approximation of the M1 distance: discrete Frechet alignment (by
/// dynamic programming) of the canonical parametric representations, with
/// ground cost max(|u1-u2|, |r1-r2|). Always >= the true d_M1 and converges
/// to it with resolution for piecewise-linear/step inputs. Both paths are
/// passed through hat() first.
double m1_distance(const CadlagPath& f, const CadlagPath& g,
                   std::size_t resolution);

/// True when (u, r) lies on the completed graph of f within eps.
bool graph_contains(const CadlagPath& f, double u, double r, double eps);

/// Largest step max(|du|, |dr|) between consecutive points; the documented
/// discretization slack of m1_distance is the sum of the two paths' spacings.
double max_knot_spacing(const ParametricRepresentation& rep);

/// CSV serialization, header `t,value,is_jump,left_value`, full double
/// precision, left_value empty for non-jump rows.
void write_path_csv(const CadlagPath& path, std::ostream& out);
void write_path_csv(const CadlagPath& path, const std::string& filename);
CadlagPath read_path_csv(std::istream& in, Interp interp);
CadlagPath read_path_csv(const std::string& filename, Interp interp);

}  // namespace ifc
