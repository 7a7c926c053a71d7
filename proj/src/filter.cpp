#include "rom/filter.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>

#include "rom/errors.hpp"

namespace rom {

namespace {

Eigen::VectorXd filter_row(const Eigen::VectorXd& series, double dt, const FilterConfig& config) {
  Spectrum spectrum = dft_forward(series, dt);
  const Eigen::Index n = spectrum.size();
  const PsdVector power = psd(spectrum, n);

  if (!config.keep_dc && power.values[0] < config.psd_threshold) {
    spectrum.coefficients[0] = {0.0, 0.0};
  }
  for (Eigen::Index k = 1; k <= n / 2; ++k) {
    if (power.values[k] < config.psd_threshold) {
      spectrum.coefficients[k] = {0.0, 0.0};
      spectrum.coefficients[n - k] = {0.0, 0.0};  // k == n-k at n/2 for even n
    }
  }
  return dft_inverse(spectrum);
}

}  // namespace

PsdVector psd(const Spectrum& spectrum, Eigen::Index n_time) {
  if (n_time != spectrum.size()) {
    throw std::invalid_argument("psd: n_time " + std::to_string(n_time) +
                                " does not match spectrum length " + std::to_string(spectrum.size()));
  }
  PsdVector result;
  result.values.resize(n_time);
  result.frequencies_hz.resize(n_time);
  const double inv_n = 1.0 / static_cast<double>(n_time);
  const double df = inv_n / spectrum.dt;
  for (Eigen::Index k = 0; k < n_time; ++k) {
    result.values[k] = std::norm(spectrum.coefficients[k]) * inv_n;
    result.frequencies_hz[k] = static_cast<double>(k) * df;
  }
  return result;
}

SnapshotMatrix filter_snapshots(const SnapshotMatrix& snapshots, const FilterConfig& config,
                                int n_threads) {
  validate(snapshots);
  if (!std::isfinite(config.psd_threshold) || config.psd_threshold < 0.0) {
    throw std::invalid_argument("filter threshold must be finite and >= 0");
  }
  if (n_threads < 1) throw std::invalid_argument("thread count must be >= 1");

  SnapshotMatrix filtered = snapshots;
  const Eigen::Index n_rows = snapshots.n_dof();

  auto process_range = [&](Eigen::Index begin, Eigen::Index end) {
    for (Eigen::Index i = begin; i < end; ++i) {
      const Eigen::VectorXd row = snapshots.values.row(i).transpose();
      filtered.values.row(i) = filter_row(row, snapshots.dt, config).transpose();
    }
  };

  if (n_threads == 1 || n_rows < 2 * n_threads) {
    process_range(0, n_rows);
    return filtered;
  }

  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(n_threads));
  const Eigen::Index chunk = (n_rows + n_threads - 1) / n_threads;
  for (int t = 0; t < n_threads; ++t) {
    const Eigen::Index begin = static_cast<Eigen::Index>(t) * chunk;
    const Eigen::Index end = std::min(begin + chunk, n_rows);
    if (begin >= end) break;
    workers.emplace_back([&, t, begin, end] {
      try {
        process_range(begin, end);
      } catch (...) {
        failures[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  }
  for (auto& worker : workers) worker.join();
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  return filtered;
}

void write_psd_report_csv(std::ostream& out, const SnapshotMatrix& snapshots,
                          const std::vector<Eigen::Index>& dof_indices) {
  validate(snapshots);
  for (const Eigen::Index dof : dof_indices) {
    if (dof < 0 || dof >= snapshots.n_dof()) {
      throw std::invalid_argument("DOF index " + std::to_string(dof) + " out of range [0, " +
                                  std::to_string(snapshots.n_dof()) + ")");
    }
  }

  out << "dof_index,bin,frequency_hz,psd\n";
  char buffer[40];
  for (const Eigen::Index dof : dof_indices) {
    const Eigen::VectorXd row = snapshots.values.row(dof).transpose();
    const Spectrum spectrum = dft_forward(row, snapshots.dt);
    const PsdVector power = psd(spectrum, spectrum.size());
    for (Eigen::Index k = 0; k < power.values.size(); ++k) {
      out << dof << "," << k << ",";
      std::snprintf(buffer, sizeof(buffer), "%.17g", power.frequencies_hz[k]);
      out << buffer << ",";
      std::snprintf(buffer, sizeof(buffer), "%.17g", power.values[k]);
      out << buffer << "\n";
    }
  }
}

}  // namespace rom
