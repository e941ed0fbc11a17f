#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ol2r/dataset.hpp"
#include "ol2r/linalg.hpp"
#include "ol2r/ranker.hpp"
#include "ol2r/rng.hpp"
#include "ol2r/serialize.hpp"

namespace ol2r {

/// Directed certain order: `above` is ranked before `below`. The margin
/// |sigma(logit) - 0.5| is kept for the cycle fallback in topo_rank.
struct CertainEdge {
  int above = 0;
  int below = 0;
  double margin = 0.0;
};

/// Split of all document pairs into certain orders (directed, acyclic for
/// ensemble partitions) and uncertain pairs (unordered, i < j).
struct CertaintyPartition {
  int n_docs = 0;
  std::vector<CertainEdge> certain;
  std::vector<std::pair<int, int>> uncertain;
};

/// N independently perturbed rankers; nu scales the pseudo noise fed to
/// their training. perturb_params additionally shifts each member's
/// regularization center.
struct Ensemble {
  std::vector<Ranker> members;
  double nu = 0.0;
  bool perturb_params = false;

  int size() const { return static_cast<int>(members.size()); }
};

/// A pair (i, j) is a certain order exactly when every member agrees on
/// its sign; ties at zero count as uncertain. The certain relation is an
/// intersection of the members' score orders, hence acyclic.
CertaintyPartition ensemble_partition(const Ensemble& e, const Query& q);

/// Full covariance mode keeps matrices beyond this parameter count out of
/// reach; the dense inverse maintenance is quadratic per pair and the
/// point of comparison, not something to silently let explode.
constexpr int kFullCovarianceGate = 4096;

enum class CovarianceMode { full, diagonal };

/// A_t = lambda I + sum of v v^T over observed pair feature vectors
/// (x_i - x_j for linear rankers, (g_i - g_j)/sqrt(width) for neural).
/// Full mode maintains A^{-1} by rank-one updates and re-checks the drift
/// every check_interval updates, rebuilding from a Cholesky solve if it
/// exceeds 1e-6.
class CovarianceState {
 public:
  CovarianceState() = default;
  CovarianceState(CovarianceMode mode, int dim, double lambda,
                  int check_interval = 4096);

  CovarianceMode mode() const { return mode_; }
  int dim() const { return dim_; }
  double lambda() const { return lambda_; }
  std::int64_t update_count() const { return update_count_; }

  void update(std::span<const double> v);

  /// v^T A^{-1} v (full) or sum v_k^2 / diag_k (diagonal).
  double width_sq(std::span<const double> v) const;

  /// log det(A): Cholesky in full mode, sum of log diagonal otherwise.
  double log_det() const;
  /// log det(A) - dim * log(lambda)
  double log_det_ratio() const;

  /// ||A A^{-1} - I||_max; meaningful in full mode only.
  double inverse_error() const;

  const DenseMatrix& matrix() const { return a_; }
  const DenseMatrix& inverse() const { return a_inv_; }
  std::span<const double> diagonal() const { return diag_; }

  void save(BinaryWriter& w) const;
  static CovarianceState restore(BinaryReader& r);

 private:
  void maybe_recheck();

  CovarianceMode mode_ = CovarianceMode::diagonal;
  int dim_ = 0;
  double lambda_ = 1.0;
  int check_interval_ = 4096;
  std::int64_t update_count_ = 0;
  int since_check_ = 0;
  DenseMatrix a_;
  DenseMatrix a_inv_;
  std::vector<double> diag_;
};

struct AlphaParams {
  /// When set, the schedule is bypassed entirely.
  std::optional<double> constant;
  /// All analysis constants collapsed into one tunable factor.
  double multiplier = 1.0;
  /// Sub-Gaussian scale of the pairwise click noise.
  double noise_scale = 0.5;
  double delta = 1.0;
  /// Additive term inside the parenthesis (feature dimension for linear
  /// rankers, sqrt(lambda) for neural ones).
  double additive = 0.0;
};

/// multiplier * (sqrt(R^2 * (log det(A)/det(lambda I) + 2 log(1/delta))) + additive),
/// or the constant override. Non-decreasing under covariance updates.
double alpha_schedule(const CovarianceState& cov, const AlphaParams& params);

/// Which parameters the gradient features g(x; theta) are taken at for
/// neural covariance vectors.
enum class GradFeatures { current, initial };

/// Confidence-interval partition: (i, j) is certain toward i when
/// sigma(logit) - alpha * ||v||_{A^{-1}} > 1/2 with v the pair feature
/// vector. precomputed_features, when given, holds one feature vector per
/// document (row-major dim entries each); otherwise they are derived from
/// the ranker.
CertaintyPartition ci_partition(const Ranker& r, const CovarianceState& cov,
                                double alpha, const Query& q,
                                GradFeatures grad_features = GradFeatures::current);

/// Per-document covariance feature rows for a query (x for linear,
/// g(x)/sqrt(width) for neural). Row-major, q.size() x cov-dim.
std::vector<double> covariance_features(const Ranker& r, const Query& q,
                                        GradFeatures grad_features);

/// Random topological order: repeatedly picks uniformly among documents
/// whose certain predecessors have all been emitted. When a cycle blocks
/// progress (possible only for CI partitions) the remaining certain edge
/// with the smallest margin is dropped; removed_edges counts the drops.
std::vector<int> topo_rank(const CertaintyPartition& partition, int n_docs,
                           RandomStream& rng, int* removed_edges = nullptr);

/// Position by position: explore uniformly among the unranked documents
/// with probability epsilon, otherwise take the best-scored one (score
/// ties broken at random).
std::vector<int> epsilon_greedy_rank(const Ranker& r, const Query& q,
                                     double epsilon, RandomStream& rng);

}  // namespace ol2r
