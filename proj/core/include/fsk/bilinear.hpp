#pragma once

#include <array>
#include <optional>

#include "fsk/ifs.hpp"
#include "fsk/net.hpp"

namespace fsk {

/// Knot values z_kl and vertical scalings s_kl on the (N+1) x (M+1) lattice.
struct BilinearData {
  Lattice z;
  Lattice s;
};

/// Validates shapes against the net and |s_kl| < 1.
BilinearData make_bilinear_data(const Net& net, Lattice z, Lattice s);

/// The bilinear function through the four domain-corner data values.
struct CornerBilinear {
  Rect domain;
  double z00 = 0.0;
  double zn0 = 0.0;
  double z0m = 0.0;
  double znm = 0.0;

  double operator()(double x, double y) const;
};

CornerBilinear corner_bilinear(const BilinearData& data, const Net& net);

/// Cell-wise bilinear interpolant of knot values.
class PiecewiseBilinear {
 public:
  PiecewiseBilinear(Net net, Lattice values);

  double operator()(double x, double y) const;
  const Lattice& values() const { return values_; }

 private:
  Net net_;
  Lattice values_;
};

/// Throws ShapeMismatch unless `values` is (N+1) x (M+1).
PiecewiseBilinear piecewise_bilinear(const Lattice& values, const Net& net);

/// F_ij(x, y, z) = S(u_i x, v_j y) (z - g(x, y)) + h(u_i x, v_j y). `h_values`
/// replaces the data used for h (the family then reports data.z as its knot
/// values), and `orientation` selects the horizontal maps; both exist so
/// tests can build deliberately broken families.
VerticalMapFamily bilinear_family(const Net& net, const BilinearData& data,
                                  Orientation orientation = Orientation::alternating,
                                  const std::optional<Lattice>& h_values = std::nullopt);

/// Attractor of the bilinear family, started from h.
FractalSurface build_bilinear_fis(const BilinearData& data, const Net& net, SolverConfig config = {});

/// Every cell's four corner scalings share a sign.
bool steadiness_check(const BilinearData& data);

/// The four sums of |S| at the mapped domain corners, in the order
/// (x_0, y_0), (x_0, y_M), (x_N, y_0), (x_N, y_M).
std::array<double, 4> gamma_sums(const BilinearData& data, const Net& net);

/// Common value of the four sums; UnbalancedScaling when they differ by more
/// than 1e-10.
double gamma_constant(const BilinearData& data, const Net& net);

/// True when every z_kl lies on the corner bilinear function (1e-12).
bool co_bilinear_check(const BilinearData& data, const Net& net);

struct DimensionVerdict {
  double gamma = 0.0;
  bool steady = false;
  bool balanced = false;
  bool co_bilinear = false;
  double predicted = 2.0;
};

/// 1 + log(gamma) / log(N) when gamma > N and the data are not co-bilinear,
/// 2 otherwise. HypothesisUnmet when M != N or the scalings are unsteady or
/// unbalanced.
DimensionVerdict theoretical_box_dimension(const BilinearData& data, const Net& net);

}  // namespace fsk
