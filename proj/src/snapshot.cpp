#include "rom/snapshot.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "rom/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "on-disk formats are little-endian and read/written natively");

namespace rom {

namespace {

constexpr char kMagic[8] = {'R', 'O', 'M', 'S', 'N', 'A', 'P', '1'};

template <typename T>
void write_raw(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in, const std::filesystem::path& path, const char* what) {
  T value{};
  const auto offset = in.tellg();
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) {
    throw io_error(path.string() + ": truncated while reading " + what + " at byte offset " +
                   std::to_string(static_cast<long long>(offset)));
  }
  return value;
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

double parse_double(const std::string& token, const std::filesystem::path& path, std::size_t row,
                    std::size_t column) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw io_error(path.string() + ": row " + std::to_string(row) + ", column " +
                   std::to_string(column) + ": not a number: '" + token + "'");
  }
  return value;
}

SnapshotMatrix load_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path.string() + ": cannot open for reading");

  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw io_error(path.string() + ": bad magic at byte offset 0 (expected ROMSNAP1)");
  }

  const auto n_dof = read_raw<std::uint64_t>(in, path, "n_dof");
  const auto n_time = read_raw<std::uint64_t>(in, path, "n_time");
  const auto t0 = read_raw<double>(in, path, "t0");
  const auto dt = read_raw<double>(in, path, "dt");
  const auto tag = read_raw<std::uint8_t>(in, path, "field tag");
  if (tag > 3) {
    throw io_error(path.string() + ": invalid field tag " + std::to_string(int(tag)) +
                   " at byte offset 40");
  }
  const auto name_len = read_raw<std::uint16_t>(in, path, "name length");
  std::string name(name_len, '\0');
  if (name_len > 0) {
    in.read(name.data(), name_len);
    if (!in) throw io_error(path.string() + ": truncated while reading name");
  }

  if (n_dof == 0 || n_time == 0) {
    throw io_error(path.string() + ": header declares " + std::to_string(n_dof) + "x" +
                   std::to_string(n_time) + " matrix; need n_dof >= 1 and n_time >= 1");
  }
  constexpr std::uint64_t kMaxEntries = std::uint64_t{1} << 32;
  if (n_time != 0 && n_dof > kMaxEntries / n_time) {
    throw io_error(path.string() + ": header declares an implausibly large matrix");
  }

  SnapshotMatrix snap;
  snap.t0 = t0;
  snap.dt = dt;
  snap.field = static_cast<FieldKind>(tag);
  snap.name = std::move(name);
  snap.values.resize(static_cast<Eigen::Index>(n_dof), static_cast<Eigen::Index>(n_time));

  const auto payload_offset = in.tellg();
  in.read(reinterpret_cast<char*>(snap.values.data()),
          static_cast<std::streamsize>(n_dof * n_time * sizeof(double)));
  if (!in) {
    throw io_error(path.string() + ": payload truncated; expected " +
                   std::to_string(n_dof * n_time) + " f64 values starting at byte offset " +
                   std::to_string(static_cast<long long>(payload_offset)));
  }
  in.peek();
  if (!in.eof()) {
    throw io_error(path.string() + ": trailing bytes after payload (dimension mismatch between "
                   "header and file size)");
  }

  for (Eigen::Index j = 0; j < snap.n_time(); ++j) {
    for (Eigen::Index i = 0; i < snap.n_dof(); ++i) {
      if (!std::isfinite(snap.values(i, j))) {
        throw io_error(path.string() + ": non-finite value at row " + std::to_string(i) +
                       ", column " + std::to_string(j));
      }
    }
  }
  validate(snap);
  return snap;
}

void save_binary(const SnapshotMatrix& snap, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error(path.string() + ": cannot open for writing");

  out.write(kMagic, sizeof(kMagic));
  write_raw(out, static_cast<std::uint64_t>(snap.n_dof()));
  write_raw(out, static_cast<std::uint64_t>(snap.n_time()));
  write_raw(out, snap.t0);
  write_raw(out, snap.dt);
  write_raw(out, static_cast<std::uint8_t>(snap.field));
  write_raw(out, static_cast<std::uint16_t>(snap.name.size()));
  out.write(snap.name.data(), static_cast<std::streamsize>(snap.name.size()));
  out.write(reinterpret_cast<const char*>(snap.values.data()),
            static_cast<std::streamsize>(snap.values.size() * sizeof(double)));
  out.flush();
  if (!out) throw io_error(path.string() + ": write failed");
}

SnapshotMatrix load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error(path.string() + ": cannot open for reading");

  std::string header;
  if (!std::getline(in, header)) throw io_error(path.string() + ": empty file");
  if (!header.empty() && header.back() == '\r') header.pop_back();

  std::vector<std::string> columns;
  {
    std::stringstream ss(header);
    std::string cell;
    while (std::getline(ss, cell, ',')) columns.push_back(cell);
  }
  if (columns.size() < 2 || columns[0] != "t") {
    throw io_error(path.string() + ": row 0: header must be \"t,<name>_0,...\"");
  }
  const std::size_t n_dof = columns.size() - 1;

  // Field name comes from the first DOF column, stripping the "_0" suffix.
  std::string name = columns[1];
  if (const auto pos = name.rfind("_0"); pos != std::string::npos && pos == name.size() - 2) {
    name.erase(pos);
  }

  std::vector<double> times;
  std::vector<double> payload;  // column-major accumulation, one snapshot at a time
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      const double value = parse_double(cell, path, row, col);
      if (!std::isfinite(value)) {
        throw io_error(path.string() + ": non-finite value at row " + std::to_string(row) +
                       ", column " + std::to_string(col));
      }
      if (col == 0) {
        times.push_back(value);
      } else {
        payload.push_back(value);
      }
      ++col;
    }
    if (col != n_dof + 1) {
      throw io_error(path.string() + ": row " + std::to_string(row) + " has " +
                     std::to_string(col) + " cells, header declares " + std::to_string(n_dof + 1));
    }
  }

  const std::size_t n_time = times.size();
  if (n_time < 2) throw io_error(path.string() + ": need at least 2 data rows");

  const double dt = times[1] - times[0];
  if (!(dt > 0.0)) throw io_error(path.string() + ": time column must be strictly increasing");
  for (std::size_t i = 1; i < n_time; ++i) {
    const double gap = times[i] - times[i - 1];
    if (std::abs(gap - dt) > 1e-9 * dt) {
      throw io_error(path.string() + ": row " + std::to_string(i + 1) +
                     ": non-uniform time spacing (" + format_double(gap) + " vs " +
                     format_double(dt) + ")");
    }
  }

  SnapshotMatrix snap;
  snap.dt = dt;
  snap.t0 = times[0] - dt;  // column 0 holds the sample at t0 + dt
  snap.name = name;
  snap.values.resize(static_cast<Eigen::Index>(n_dof), static_cast<Eigen::Index>(n_time));
  for (std::size_t j = 0; j < n_time; ++j) {
    for (std::size_t i = 0; i < n_dof; ++i) {
      snap.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          payload[j * n_dof + i];
    }
  }
  validate(snap);
  return snap;
}

void save_csv(const SnapshotMatrix& snap, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error(path.string() + ": cannot open for writing");

  out << "t";
  for (Eigen::Index i = 0; i < snap.n_dof(); ++i) out << "," << snap.name << "_" << i;
  out << "\n";
  for (Eigen::Index j = 0; j < snap.n_time(); ++j) {
    out << format_double(snap.time_at(j));
    for (Eigen::Index i = 0; i < snap.n_dof(); ++i) out << "," << format_double(snap.values(i, j));
    out << "\n";
  }
  out.flush();
  if (!out) throw io_error(path.string() + ": write failed");
}

}  // namespace

const char* field_kind_name(FieldKind kind) {
  switch (kind) {
    case FieldKind::EulerianScalar: return "eulerian";
    case FieldKind::LagrangianX: return "lagrangian-x";
    case FieldKind::LagrangianY: return "lagrangian-y";
    case FieldKind::LagrangianZ: return "lagrangian-z";
  }
  return "unknown";
}

void validate(const SnapshotMatrix& snap) {
  if (snap.n_dof() < 1) throw std::invalid_argument("snapshot matrix needs n_dof >= 1");
  // Full histories carry at least two instants; single-column matrices are
  // accepted so one-step predictions remain storable.
  if (snap.n_time() < 1) throw std::invalid_argument("snapshot matrix needs n_time >= 1");
  if (!(snap.dt > 0.0) || !std::isfinite(snap.dt)) {
    throw std::invalid_argument("snapshot dt must be finite and > 0");
  }
  if (!std::isfinite(snap.t0)) throw std::invalid_argument("snapshot t0 must be finite");
  if (snap.name.find(',') != std::string::npos || snap.name.find('\n') != std::string::npos) {
    throw std::invalid_argument("snapshot name must not contain ',' or newline");
  }
  if (snap.name.size() > 0xFFFF) throw std::invalid_argument("snapshot name too long");
  for (Eigen::Index j = 0; j < snap.n_time(); ++j) {
    for (Eigen::Index i = 0; i < snap.n_dof(); ++i) {
      if (!std::isfinite(snap.values(i, j))) {
        throw std::invalid_argument("non-finite snapshot value at row " + std::to_string(i) +
                                    ", column " + std::to_string(j));
      }
    }
  }
}

SnapshotFormat format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? SnapshotFormat::Csv : SnapshotFormat::Binary;
}

SnapshotMatrix load_snapshots(const std::filesystem::path& path, SnapshotFormat format) {
  if (!std::filesystem::exists(path)) throw io_error(path.string() + ": no such file");
  return format == SnapshotFormat::Binary ? load_binary(path) : load_csv(path);
}

void save_snapshots(const SnapshotMatrix& snap, const std::filesystem::path& path,
                    SnapshotFormat format) {
  validate(snap);
  if (format == SnapshotFormat::Binary) {
    save_binary(snap, path);
  } else {
    save_csv(snap, path);
  }
}

std::pair<SnapshotMatrix, SnapshotMatrix> split_train_validation(const SnapshotMatrix& snap,
                                                                 const SplitSpec& spec) {
  if (spec.n_train < 1) throw std::invalid_argument("split needs n_train >= 1");
  if (spec.n_validation < 0) throw std::invalid_argument("split needs n_validation >= 0");
  if (spec.n_train + spec.n_validation > snap.n_time()) {
    throw std::invalid_argument("split of " + std::to_string(spec.n_train) + "+" +
                                std::to_string(spec.n_validation) + " columns exceeds n_time = " +
                                std::to_string(snap.n_time()));
  }

  SnapshotMatrix train;
  train.values = snap.values.leftCols(spec.n_train);
  train.t0 = snap.t0;
  train.dt = snap.dt;
  train.field = snap.field;
  train.name = snap.name;

  SnapshotMatrix validation;
  validation.values = snap.values.middleCols(spec.n_train, spec.n_validation);
  // Validation column 0 keeps its original time stamp t0 + (n_train+1)*dt.
  validation.t0 = snap.t0 + static_cast<double>(spec.n_train) * snap.dt;
  validation.dt = snap.dt;
  validation.field = snap.field;
  validation.name = snap.name;

  return {std::move(train), std::move(validation)};
}

}  // namespace rom
