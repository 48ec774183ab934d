#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <sstream>

#include "helpers.hpp"
#include "schemacalc/causal.hpp"
#include "schemacalc/workflow.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string("\"") + SCHEMACALC_CLI + "\" " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path work(const std::string& name) {
  auto dir = fs::path(SCHEMACALC_TEST_WORK) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

}  // namespace

TEST_CASE("laws: pass, determinism, usage error") {
  auto a = work("laws_a"), b = work("laws_b");
  auto ra = cli("laws --cases 100 --seed 3 --out " + q(a));
  CHECK(ra.code == 0);
  auto report = read_json(a / "report.json");
  CHECK(report["status"] == "pass");
  CHECK(report["command"] == "laws");
  CHECK(report["metrics"]["laws_failed"] == 0);
  cli("laws --cases 100 --seed 3 --out " + q(b));
  auto other = read_json(b / "report.json");
  report.erase("artifacts");
  other.erase("artifacts");
  CHECK(report == other);
  CHECK(cli("laws --cases 0").code == 2);
  CHECK(cli("frobnicate").code == 2);
}

TEST_CASE("vi: fixture, gamma override, malformed input") {
  auto dir = work("vi");
  auto r = cli("vi " + q(th::data_dir() / "mdp_2x2.json") + " --out " + q(dir));
  CHECK(r.code == 0);
  auto table = read_json(dir / "value_table.json");
  CHECK(table["values"][0].get<double>() == doctest::Approx(800.0 / 91.0).epsilon(1e-8));
  CHECK(table["values"][1].get<double>() == doctest::Approx(810.0 / 91.0).epsilon(1e-8));
  auto policy = read_json(dir / "policy.json");
  CHECK(policy["actions"] == json::array({"move", "stay"}));
  CHECK(fs::exists(dir / "trace.csv"));

  auto g0 = work("vi_g0");
  CHECK(cli("vi " + q(th::data_dir() / "mdp_2x2.json") + " --gamma 0 --out " + q(g0)).code == 0);
  auto rep = read_json(g0 / "report.json");
  CHECK(rep["metrics"]["iterations"].get<int>() <= 2);
  CHECK(rep["metrics"]["converged"] == 1);
  auto t0 = read_json(g0 / "value_table.json");
  CHECK(t0["values"][0].get<double>() == doctest::Approx(0.8));
  CHECK(t0["values"][1].get<double>() == doctest::Approx(0.9));

  auto bad = work("vi_bad");
  write(bad / "broken.json", "{\n  \"states\": [\"a\", \"b\"],\n  \"T\": [1, 2,,]\n}\n");
  auto rb = cli("vi " + q(bad / "broken.json") + " --out " + q(bad));
  CHECK(rb.code == 1);
  CHECK(rb.out.find("broken.json:3:") != std::string::npos);
  CHECK(rb.out.find("malformed JSON") != std::string::npos);

  CHECK(cli("vi " + q(th::data_dir() / "mdp_2x2.json") + " --gamma 1.5").code == 2);
}

TEST_CASE("vi: non-convergence is a partial result") {
  auto dir = work("vi_partial");
  auto r = cli("vi " + q(th::data_dir() / "mdp_2x2.json") + " --max-iter 3 --out " + q(dir));
  CHECK(r.code == 1);
  CHECK(read_json(dir / "report.json")["status"] == "partial");
}

TEST_CASE("workflow: identity, overlap, cross-path equality") {
  auto vi_dir = work("wf_vi");
  REQUIRE(cli("vi " + q(th::data_dir() / "mdp_2x2.json") + " --emit-mind --out " + q(vi_dir)).code == 0);

  auto id_dir = work("wf_id");
  write(id_dir / "unit.json", schemacalc::wf::to_json(schemacalc::wf::Workflow::unit_seq()).dump());
  CHECK(cli("workflow " + q(id_dir / "unit.json") + " " + q(vi_dir / "mind.json") + " --out " + q(id_dir)).code == 0);
  CHECK(slurp(id_dir / "mind_out.json") == slurp(vi_dir / "mind.json"));

  auto ov = work("wf_overlap");
  using namespace schemacalc::wf;
  auto clash = Workflow::raw_par(wf_prim({"update.scale", {"V"}, {}, {{"factor", 2}}}),
                                 wf_prim({"update.shift", {"V"}, {}, {{"by", 1}}}));
  write(ov / "par.json", to_json(clash).dump());
  auto r = cli("workflow " + q(ov / "par.json") + " " + q(vi_dir / "mind.json") + " --out " + q(ov));
  CHECK(r.code == 1);
  CHECK(r.out.find("OverlappingParTargets") != std::string::npos);

  auto wf_dir = work("wf_run");
  REQUIRE(cli("workflow " + q(vi_dir / "workflow.json") + " " + q(vi_dir / "mind.json") + " --out " + q(wf_dir))
              .code == 0);
  CHECK(slurp(wf_dir / "value_table_V.json") == slurp(vi_dir / "value_table.json"));
  CHECK(fs::exists(wf_dir / "execution.log"));

  auto missing = work("wf_missing");
  write(missing / "w.json", to_json(wf_prim({"update.scale", {"nothing"}, {}, {}})).dump());
  CHECK(cli("workflow " + q(missing / "w.json") + " " + q(vi_dir / "mind.json") + " --out " + q(missing)).code == 1);
}

TEST_CASE("sample and ges: reproducible, recovers the chain") {
  auto dir = work("ges");
  const auto chain = q(th::data_dir() / "chain.json");
  REQUIRE(cli("sample " + chain + " -n 10000 --seed 5 --out " + q(dir / "a.csv")).code == 0);
  REQUIRE(cli("sample " + chain + " -n 10000 --seed 5 --out " + q(dir / "b.csv")).code == 0);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));

  auto g1 = dir / "g1", g2 = dir / "g2";
  CHECK(cli("ges " + q(dir / "a.csv") + " --truth " + chain + " --out " + q(g1)).code == 0);
  CHECK(cli("ges " + q(dir / "a.csv") + " --truth " + chain + " --out " + q(g2)).code == 0);
  CHECK(read_json(g1 / "report.json")["metrics"]["markov_equivalent"] == 1);
  CHECK(slurp(g1 / "model.json") == slurp(g2 / "model.json"));
  CHECK(slurp(g1 / "trace.csv") == slurp(g2 / "trace.csv"));
  CHECK(fs::exists(g1 / "cpdag.json"));
}

TEST_CASE("ges on independent data learns nothing") {
  using namespace schemacalc::causal;
  auto dir = work("ges_ind");
  auto c = make_uniform(numbered_variables(3, 2), Dag(3));
  write(dir / "ind.csv", to_csv(sample_data(c, 10000, 12)));
  CHECK(cli("ges " + q(dir / "ind.csv") + " --out " + q(dir / "out")).code == 0);
  auto rep = read_json(dir / "out" / "report.json");
  CHECK(rep["metrics"]["edges"] == 0);
  CHECK(rep["metrics"]["forward_moves"] == 0);
  CHECK(rep["metrics"]["backward_moves"] == 0);
}
