#pragma once

// Data behind the likelihood, risk-range and epsilon figures.

#include "qminimax/minimax.hpp"
#include "qminimax/serialize.hpp"

#include <string>
#include <vector>

namespace qmm {

struct FigureTable {
  std::string figure_id;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Throws InvalidArgument on ragged rows or non-finite entries.
  void validate() const;
  CsvTable to_csv_table() const;
  std::vector<double> column(const std::string& name) const;
};

struct FigureParams {
  /// Empty means the per-figure default.
  std::vector<int> n_values;
  int p_points = 101;
  EpsilonSearchSpec search;
};

std::vector<int> default_figure_n(const std::string& figure_id);

/// fig1: p and L_N(p) = p^N for each N. fig2: min and max risk of
/// ML exact, admix at eps = 0, admix at eps*, ML-eps at eps*. fig3: eps* for
/// both families.
FigureTable emit_figure_data(const std::string& figure_id, const FigureParams& params = {});

}  // namespace qmm
