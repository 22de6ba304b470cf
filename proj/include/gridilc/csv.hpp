#ifndef GRIDILC_CSV_HPP
#define GRIDILC_CSV_HPP

#include "gridilc/analysis.hpp"
#include "gridilc/plant_sim.hpp"

#include <filesystem>
#include <vector>

namespace gridilc::csv {

void write_matrix(const std::filesystem::path& path, const Mat& m);

/// cycle,hour,node,u_ilc,y_li,max_abs_freq (frequency in Hz, 1-based hour/node)
void write_cycles(const std::filesystem::path& path, const std::vector<CycleResult>& results);

/// cycle,error_norm
void write_error_norms(const std::filesystem::path& path, const std::vector<double>& norms);

/// kappa,rho,sigma_max,as,mc
void write_design(const std::filesystem::path& path, const ConvergenceReport<double>& report);

/// cycle,sum_demand,sum_y,sum_u
void write_summary(const std::filesystem::path& path, const std::vector<double>& demand,
                   const std::vector<double>& y, const std::vector<double>& u);

}  // namespace gridilc::csv

#endif  // GRIDILC_CSV_HPP
