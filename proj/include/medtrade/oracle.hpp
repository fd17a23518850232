#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

#include "medtrade/mechanism.hpp"

namespace medtrade {

/// Grid discretization of an instance: cell masses are exact cdf differences
/// at cell boundaries, representative points the cell midpoints, so the
/// discrete model is a true probability model and IC/IR sums are exact.
struct DiscreteInstance {
  std::vector<double> q_points, t_points;  ///< cell midpoints
  std::vector<double> q_mass, t_mass;      ///< exact cdf differences
  std::vector<double> t_width;
  /// values[i][j] = v(q_i, t_j); virtuals[i][j] subtracts v_t times the
  /// discrete inverse hazard (suffix mass over mass/width, right-edge cdf).
  std::vector<std::vector<double>> values, virtuals;
  double reserve = 0.0;

  static DiscreteInstance from(const ProblemInstance& inst, std::size_t n_q,
                               std::size_t n_t);

  std::size_t n_q() const { return q_points.size(); }
  std::size_t n_t() const { return t_points.size(); }

  /// Discrete MHR analog: every virtuals row weakly increasing in t.
  bool virtuals_monotone_in_t() const;
};

/// Grid-level threshold mechanism: buyer t_j trades iff the quality index
/// i >= k_j. Payments are per-type; the seller side is the constant reserve.
struct DiscreteMechanism {
  std::vector<int> threshold_index;  ///< k_j in [0, n_q]; n_q means no trade
  std::vector<double> payments;
  double pay_seller = 0.0;
};

struct DiscreteEval {
  double revenue = 0.0;
  double worst_violation = 0.0;
};

struct EnumerationResult {
  DiscreteMechanism best;
  double best_revenue = 0.0;
  std::uint64_t candidates = 0;
};

/// Number of non-increasing threshold vectors of length n_t with values in
/// [0, n_q]: C(n_t + n_q, n_q).
std::uint64_t threshold_vector_count(std::size_t n_t, std::size_t n_q);

/// Stars-and-bars unranking of the enumeration order (supports deterministic
/// resumption and partitioning across workers).
std::vector<int> unrank_threshold_vector(std::size_t n_t, std::size_t n_q,
                                         std::uint64_t rank);

/// Lexicographic successor within the non-increasing family; false past the
/// last vector.
bool next_threshold_vector(std::vector<int>& k, std::size_t n_q);

/// Envelope payments for a threshold vector: U telescoped from the exact
/// value differences with U(t_1) = 0; never-trading rows price at the top
/// value of the first trading row (or above every prior value if none).
DiscreteMechanism envelope_mechanism(const DiscreteInstance& dinst,
                                     std::vector<int> k);

/// Pointwise rule: trade iff the discrete virtual surplus is >= 0.
DiscreteMechanism pointwise_rule(const DiscreteInstance& dinst);

/// Discretize a continuum mechanism: k_j = first midpoint above lambda(t_j).
DiscreteMechanism discretize(const DiscreteInstance& dinst,
                             const ThresholdMechanism& mech);

/// Exact discrete objective and the worst violation over all original
/// constraints (IR, both obedience branches, the non-linear truthfulness
/// form, the seller payment).
DiscreteEval evaluate_discrete(const DiscreteInstance& dinst,
                               const DiscreteMechanism& dmech);

struct EnumerateOptions {
  std::uint64_t max_candidates = 3000000;  ///< allows 12x12
  int workers = 0;                         ///< 0: env MEDTRADE_WORKERS or hardware
  double feasibility_tol = 1e-9;
};

/// Exhaustive scan of all monotone threshold vectors with envelope payments;
/// returns the feasible revenue maximizer. Ties break toward larger total
/// trade probability, then the lexicographically smallest vector, so the
/// result is schedule-independent. Throws input_error if the candidate count
/// exceeds the bound.
EnumerationResult enumerate_optimal(const DiscreteInstance& dinst,
                                    const EnumerateOptions& opt = {});

struct ComparisonRow {
  std::size_t grid_size = 0;
  double discrete_opt = 0.0;        ///< enumerated when possible, else pointwise rule
  double closed_form = 0.0;         ///< discretized continuum mechanism, same grid
  double closed_form_quadrature = 0.0;
  double gap = 0.0;                 ///< (discrete_opt - closed_form) / |discrete_opt|
  bool enumerated = false;
  bool vectors_match = false;       ///< enumerated best == pointwise rule
};

/// Refinement study across grid sizes; deterministic for a fixed instance.
std::vector<ComparisonRow> compare(const ProblemInstance& inst,
                                   const ThresholdMechanism& mech,
                                   const std::vector<std::size_t>& grid_sizes,
                                   const EnumerateOptions& opt = {});

}  // namespace medtrade
