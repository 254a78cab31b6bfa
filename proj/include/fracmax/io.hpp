#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fracmax/grid.hpp"
#include "fracmax/maximal.hpp"
#include "fracmax/selection.hpp"
#include "fracmax/verify.hpp"

namespace fracmax {

/// Reads a manifest {"dim", "shape", "spacing", "origin", "data" | "data_inline"}.
/// "data" is a path to raw little-endian binary64 values (row-major), relative
/// to the manifest's directory. Throws Io or InvalidGrid.
GridFunction read_grid(const std::filesystem::path& manifest);

/// Writes the manifest and, unless `inline_data`, `<stem>.bin` beside it.
void write_grid(const GridFunction& f, const std::filesystem::path& manifest, bool inline_data = false);

/// Grid file of the field values plus `<stem>.witness.json`: one
/// {center, radius, avg} object per cell in cell order.
void write_maximal_field(const MaximalField& m, const std::filesystem::path& manifest, bool inline_data = false);

/// JSON array of report records. Infinite exponents are written as "inf" and
/// undefined parameters as null.
void write_reports_json(std::ostream& os, const std::vector<VerificationReport>& reports);
/// CSV rows id,d,alpha,beta,p,h,ratio,cap,pass (one per record).
void write_reports_csv(std::ostream& os, const std::vector<VerificationReport>& reports);

/// {"pass", "records", "buckets", "drift", counters}.
void write_sweep_json(std::ostream& os, const SweepResult& result);
/// CSV rows id,d,alpha,beta,p,h,ratio,cap,pass with ratio = bucket max.
void write_sweep_csv(std::ostream& os, const SweepResult& result);

/// {"version", "history", "caps": [{id, d, alpha, beta, p, cap}]}; alpha/beta
/// null for ids without them, p may be "inf".
CapTable read_caps(const std::filesystem::path& path);

struct SelectionAudit {
  const BallFamily* family = nullptr;
  const GreedySelection* greedy = nullptr;
  SelectionParams params;
  double alpha = 0.0;
  double beta = 0.0;
  const RepresentativeSelection* representatives = nullptr;
  std::optional<TransferWindows> windows;
  std::vector<TransferReport> transfers;  // parallel to family->balls when present
};

void write_selection_audit(std::ostream& os, const SelectionAudit& audit);

}  // namespace fracmax
