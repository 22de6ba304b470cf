#include "gridilc/csv.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <numbers>

namespace gridilc::csv {

namespace {

fmt::ostream open(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  return fmt::output_file(path.string());
}

}  // namespace

void write_matrix(const std::filesystem::path& path, const Mat& m) {
  auto out = open(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.print("{}{:.17g}", j ? "," : "", m(i, j));
    out.print("\n");
  }
}

void write_cycles(const std::filesystem::path& path, const std::vector<CycleResult>& results) {
  auto out = open(path);
  out.print("cycle,hour,node,u_ilc,y_li,max_abs_freq\n");
  for (const CycleResult& r : results)
    for (Eigen::Index h = 0; h < r.y.rows(); ++h)
      for (Eigen::Index j = 0; j < r.y.cols(); ++j)
        out.print("{},{},{},{:.12g},{:.12g},{:.12g}\n", r.cycle, h + 1, j + 1, r.u(h, j), r.y(h, j),
                  r.max_abs_freq(h, j) / (2 * std::numbers::pi));
}

void write_error_norms(const std::filesystem::path& path, const std::vector<double>& norms) {
  auto out = open(path);
  out.print("cycle,error_norm\n");
  for (std::size_t c = 0; c < norms.size(); ++c) out.print("{},{:.12g}\n", c, norms[c]);
}

void write_design(const std::filesystem::path& path, const ConvergenceReport<double>& report) {
  auto out = open(path);
  out.print("kappa,rho,sigma_max,as,mc\n");
  for (std::size_t i = 0; i < report.kappa.size(); ++i)
    out.print("{:.6g},{:.12g},{:.12g},{},{}\n", report.kappa[i], report.rho[i], report.sigma_max[i],
              int(report.as[i]), int(report.mc[i]));
}

void write_summary(const std::filesystem::path& path, const std::vector<double>& demand,
                   const std::vector<double>& y, const std::vector<double>& u) {
  auto out = open(path);
  out.print("cycle,sum_demand,sum_y,sum_u\n");
  for (std::size_t c = 0; c < demand.size(); ++c)
    out.print("{},{:.12g},{:.12g},{:.12g}\n", c, demand[c], y[c], u[c]);
}

}  // namespace gridilc::csv
