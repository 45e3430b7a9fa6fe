#include "netbd/output.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace netbd {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << v;
  return os.str();
}

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const std::string& header)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
    out_.imbue(std::locale::classic());
    out_ << header << "\r\n";
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << "\r\n";
  }

  void close() {
    out_.close();
    if (!out_) throw IoError("failed writing '" + path_.string() + "'");
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

using GroupKey = std::pair<std::string, int>;

void write_cdf(const std::filesystem::path& path, const std::vector<GroupKey>& order,
               std::map<GroupKey, std::vector<double>>& samples) {
  CsvFile f(path, "scheme,B,rate,cdf");
  for (const auto& key : order) {
    for (const CdfPoint& p : empirical_cdf(samples[key])) {
      f.row({key.first, std::to_string(key.second), fmt(p.value), fmt(p.cdf)});
    }
  }
  f.close();
}

}  // namespace

std::vector<CdfPoint> empirical_cdf(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  std::vector<CdfPoint> out;
  const auto n = samples.size();
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({samples[i], i + 1 == n ? 1.0 : static_cast<double>(i + 1) / n});
  }
  return out;
}

void emit_outputs(const ExperimentResult& result, const ExperimentConfig& config,
                  const std::filesystem::path& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError("cannot create '" + directory.string() + "': " + ec.message());

  {
    CsvFile f(directory / "summary.csv", "scheme,B,mean,std,drops,excluded");
    for (const auto& s : result.summarize()) {
      f.row({s.scheme, std::to_string(s.cluster_size), fmt(s.mean), fmt(s.stddev),
             std::to_string(s.drops), std::to_string(s.excluded)});
    }
    f.close();
  }

  std::vector<GroupKey> order;
  std::map<GroupKey, std::vector<double>> sum_rates;
  for (const auto& d : result.drops) {
    const GroupKey key{d.scheme, d.cluster_size};
    if (!sum_rates.contains(key)) order.push_back(key);
    auto& v = sum_rates[key];
    if (d.nonconverged == 0) v.push_back(d.normalized_sum_rate);
  }
  write_cdf(directory / "cdf_sumrate.csv", order, sum_rates);

  std::vector<GroupKey> user_order;
  std::map<GroupKey, std::vector<double>> mean_rates;
  for (const auto& u : result.user_rates) {
    const GroupKey key{u.scheme, u.cluster_size};
    if (!mean_rates.contains(key)) user_order.push_back(key);
    mean_rates[key].push_back(u.mean_rate);
  }
  write_cdf(directory / "cdf_meanrate.csv", user_order, mean_rates);

  {
    CsvFile f(directory / "convergence.csv",
              "B,scheme,drop,iteration,normalized_g,normalized_primal");
    for (const auto& t : result.traces) {
      for (const auto& r : t.trace) {
        f.row({std::to_string(t.cluster_size), t.scheme, std::to_string(t.drop),
               std::to_string(r.iteration), fmt(t.final_dual > 0 ? r.dual_value / t.final_dual : 0.0),
               fmt(t.final_primal > 0 ? r.primal / t.final_primal : 0.0)});
      }
    }
    f.close();
  }

  const auto echo_path = directory / "config.echo.json";
  std::ofstream echo(echo_path, std::ios::trunc);
  if (!echo) throw IoError("cannot open '" + echo_path.string() + "' for writing");
  echo << config.to_json().dump(2) << "\n";
  if (!echo) throw IoError("failed writing '" + echo_path.string() + "'");
}

}  // namespace netbd
