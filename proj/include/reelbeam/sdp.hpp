#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "reelbeam/types.hpp"

namespace reelbeam::sdp {

enum class Sense { LE, EQ, GE };

constexpr double kInf = std::numeric_limits<double>::infinity();

// One scalar row: sum over blocks of coeffs[b] . X_b  (sense)  rhs.
struct ConstraintRow {
  std::vector<HermitianMatrix> coeffs;  // one per block
  Sense sense = Sense::GE;
  double rhs = 0.0;
};

// lower <= coeff . X_block <= upper, with lower = -inf or upper = +inf allowed.
struct DoubleSidedRow {
  std::size_t block = 0;
  HermitianMatrix coeff;
  double lower = -kInf;
  double upper = kInf;
};

// Complex Hermitian SDP over multiple PSD blocks with mixed-sense scalar rows
// and double-sided rows. The beamforming relaxations have identity objectives;
// general per-block cost matrices are supported (the randomization rescaling
// LP reuses this type with 1x1 blocks).
struct StandardSdp {
  std::vector<std::size_t> block_dims;
  std::vector<HermitianMatrix> objective;  // one per block
  std::vector<ConstraintRow> constraints;
  std::vector<DoubleSidedRow> double_sided;

  void validate() const;  // throws InvalidInputError on malformed input
};

// A double-sided row expands into up to two one-sided rows sharing the
// coefficient matrix; infinite bounds produce no row. `dual_slot` maps each
// expanded row to its slot in SdpSolution::duals.
struct BlockTerm {
  std::size_t block;
  const HermitianMatrix* coeff;  // borrowed from the StandardSdp
};
struct ExpandedRow {
  std::vector<BlockTerm> terms;
  Sense sense;
  double rhs;
  std::size_t dual_slot;
};
std::vector<ExpandedRow> expand_rows(const StandardSdp& p);
// Slot layout: one per constraint row, then two per double-sided row
// (lower then upper; slots for infinite bounds stay zero).
std::size_t dual_slot_count(const StandardSdp& p);

enum class SolveStatus { Optimal, Infeasible, NumericalTrouble };

struct KktInfo {
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  double complementarity = 0.0;
};

struct SolveOptions {
  int max_iters = 200;
  double tol_gap = 1e-10;
  double tol_feas = 1e-10;
  bool verbose = false;
};

struct SdpSolution {
  std::vector<HermitianMatrix> x_blocks;
  double objective_value = 0.0;
  std::vector<double> duals;  // see dual_slot_count for the layout
  SolveStatus status = SolveStatus::NumericalTrouble;
  KktInfo kkt;
  int iterations = 0;
  // Populated when status == Infeasible: a normalized dual improving ray
  // (same slot layout as duals) and how far it is from an exact certificate.
  std::vector<double> infeasibility_ray;
  double infeasibility_measure = 0.0;
};

// ---- complex-to-real embedding ----
// An n x n Hermitian H maps to the 2n x 2n symmetric [[Re H, -Im H], [Im H, Re H]].
// Inner products double under the embedding; solve() compensates by doubling
// the right-hand sides and halving the reported objective, so results are in
// complex-domain units.

struct RealMatrix {
  std::size_t n = 0;
  std::vector<double> a;  // row-major n x n
  double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

RealMatrix embed_hermitian(const HermitianMatrix& h);
HermitianMatrix complex_from_embedded(const RealMatrix& x);

struct EmbeddedRow {
  std::vector<std::pair<std::size_t, RealMatrix>> terms;
  Sense sense;
  double rhs;  // doubled relative to the complex-domain row
  std::size_t dual_slot;
};
struct EmbeddedSdp {
  std::vector<std::size_t> block_dims;  // 2n per complex block
  std::vector<RealMatrix> objective;
  std::vector<EmbeddedRow> rows;
  double inner_scale = 0.5;  // complex inner product = inner_scale * embedded trace product
  std::size_t dual_slots = 0;
};
EmbeddedSdp embed_real(const StandardSdp& p);

// Primal-dual path-following interior-point solve (Nesterov-Todd scaling,
// Mehrotra predictor-corrector, dense normal equations).
SdpSolution solve(const StandardSdp& p, const SolveOptions& opts = {});

// Recompute KKT residuals from the raw problem data; shares nothing with the
// solver besides the expansion order of rows.
KktInfo kkt_report(const StandardSdp& p, const SdpSolution& s);

}  // namespace reelbeam::sdp
