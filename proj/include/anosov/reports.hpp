#pragma once

// Report emission.  Each pipeline step writes into `pipeline.<N>/` under the
// output directory; the top level holds metadata.json and findings.csv.
//
// CSV headers:
//   certificate.csv  radius,worst_gap,log_worst_gap
//   exponent.csv     t_bin,count,log_count
//   dimension.csv    epsilon,net_count
//   scan.csv         triple_id,margin,witness_words
//   profile.csv      step,residual
//   shadow.csv       eta,ratio,lower,upper
//   boundary.csv     point_id,ray,error_bound,x1..xd
//   findings.csv     step,command,property,holds,value,witness
//
// Numbers are printed with %.17g, so identical runs give identical bytes.
// SVG files carry the tool version in their first line.

#include <string>
#include <vector>

#include "anosov/pipeline.hpp"

namespace anosov {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const;
};

std::string csv_number(double v);

/// Writes every report of the record; returns the written paths relative to
/// out_dir, metadata.json last.  IoError when the directory is not writable.
std::vector<std::string> emit_reports(const RunRecord& record, const std::string& out_dir);

}  // namespace anosov
