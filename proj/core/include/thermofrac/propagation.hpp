#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "thermofrac/assembly.hpp"

namespace thermofrac {

/// Displacement-correlation estimate at one tip face.
struct SifEstimate {
  int fracture = -1;
  int tip_face = -1;
  int cell = -1;      // fracture cell adjacent to the tip
  double k_i = 0.0;   // [Pa sqrt(m)]
  double k_ii = 0.0;
  double r = 0.0;     // tip face centre to cell centre [m]
  Vec2 e_perp = Vec2::Zero();  // in-plane direction pointing out of the fracture
  Vec2 e_n = Vec2::Zero();
};

/// sqrt(2 pi / r) G / (kappa + 1).
double sif_factor(double shear_modulus, double poisson_ratio, double r);

std::vector<SifEstimate> compute_sifs(const Problem& problem, const DofLayout& layout, const Vec& x);

/// Outcome of one propagation evaluation.
struct PropagationResult {
  std::vector<SifEstimate> sifs;
  std::vector<PropagationEvent> events;
  /// Per fracture, per fracture cell of the new grid: mass correction flag.
  std::vector<std::vector<char>> mass_correction;
  std::vector<int> affected_nodes;
  bool grid_changed() const;
};

/// Splits the face ahead of every tip with K_I >= K_Ic (one face per tip),
/// re-lays out the state, initialises the new unknowns and rediscretises
/// locally. `layout`, `x` and `disc` are updated in place.
PropagationResult evaluate_and_propagate(Problem& problem, Discretization& disc, DofLayout& layout, Vec& x);

/// Initialisation of the unknowns that appeared with `events`, given the
/// displacement traces (interleaved per face) of the grid before splitting.
void initialise_new_cells(const Problem& problem, const DofLayout& layout, const std::vector<PropagationEvent>& events,
                          const Vec& face_displacement, Vec& x);

/// One row per tip and evaluation: time, fracture, tip face, K_I, K_II, action.
class PropagationLog {
 public:
  void record(double time, const PropagationResult& result);
  void write_csv(std::ostream& os) const;

  struct Row {
    double time;
    int fracture;
    int tip_face;
    double k_i;
    double k_ii;
    std::string action;
  };
  const std::vector<Row>& rows() const { return rows_; }

 private:
  std::vector<Row> rows_;
};

/// Flags tips that are supercritical again right after being created by a
/// split, i.e. propagation faster than one face per step.
class PropagationMonitor {
 public:
  /// Returns warnings for this evaluation.
  std::vector<std::string> check(double time, double dt, double h, const PropagationResult& result);

 private:
  std::vector<std::pair<int, int>> fresh_tips_;  // (fracture, tip face) created in the previous evaluation
};

}  // namespace thermofrac
