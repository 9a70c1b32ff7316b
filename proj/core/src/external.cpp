#include "pwcvx/external.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>
#include <unordered_map>

namespace pwcvx {

namespace {

std::string replace_all(std::string s, const std::string& from,
                        const std::string& to) {
  size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

std::atomic<int> file_counter{0};

}  // namespace

ExternalResult solve_with_external(const Model& m,
                                   const ExternalSolverConfig& cfg) {
  namespace fs = std::filesystem;
  fs::path dir = cfg.workdir.empty() ? fs::temp_directory_path()
                                     : fs::path(cfg.workdir);
  fs::create_directories(dir);
  int id = file_counter.fetch_add(1);
  std::string tag = "pwcvx_ext_" + std::to_string(id);
  fs::path in_path = dir / (tag + ".lp");
  fs::path out_path = dir / (tag + ".sol");

  write_lp(m, in_path.string());
  std::error_code ec;
  fs::remove(out_path, ec);

  std::string cmd = cfg.command;
  cmd = replace_all(cmd, "{in}", in_path.string());
  cmd = replace_all(cmd, "{out}", out_path.string());

  ExternalResult res;
  int rc = std::system(cmd.c_str());
  if (!fs::exists(out_path)) {
    res.status = "error";
    if (!cfg.keep_files) fs::remove(in_path, ec);
    return res;
  }
  LpFileSolution sol = read_solution(out_path.string());
  res.status = sol.status.empty() ? (rc == 0 ? "optimal" : "error") : sol.status;
  res.objective = sol.objective;
  if (!sol.values.empty()) {
    std::unordered_map<std::string, int> index;
    for (int j = 0; j < m.n_vars(); ++j) index[m.names[j]] = j;
    res.point.assign(m.n_vars(), 0.0);
    for (const auto& [name, v] : sol.values) {
      auto it = index.find(name);
      if (it != index.end()) res.point[it->second] = v;
    }
  }
  if (!cfg.keep_files) {
    fs::remove(in_path, ec);
    fs::remove(out_path, ec);
  }
  return res;
}

}  // namespace pwcvx
