// End-to-end checks of the command line tool: artifact contracts, exit
// codes, manifest reruns. Runs the real binary.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const std::string kCli = SOCNET_CLI_PATH;

int run_cli(const std::string& args) {
  std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "socnet_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

}  // namespace

TEST_CASE("exit codes distinguish usage, validation and success") {
  CHECK(run_cli("definitely-not-a-command") == 2);
  CHECK(run_cli("stats --nodes only") == 2);  // missing required --edges

  // validation: malformed edge weight
  fs::path dir = work_dir() / "badinput";
  fs::create_directories(dir);
  write_file(dir / "nodes.csv",
             "student_id,school_id,course,class_group,gender,crt,q1,q2,q3\n"
             "a,s1,1,g1,M,2,0,0,0\n"
             "b,s1,1,g1,F,1,1,0,0\n");
  write_file(dir / "edges.csv", "src,dst,weight\na,b,9\n");
  CHECK(run_cli("--out " + (dir / "out").string() + " stats --nodes " +
                (dir / "nodes.csv").string() + " --edges " + (dir / "edges.csv").string()) == 3);

  // missing input file
  CHECK(run_cli("--out " + (dir / "out").string() + " stats --nodes /nonexistent.csv --edges " +
                (dir / "edges.csv").string()) == 3);
}

TEST_CASE("stats on a single-edge fixture") {
  fs::path dir = work_dir() / "single";
  fs::create_directories(dir);
  write_file(dir / "nodes.csv",
             "student_id,school_id,course,class_group,gender,crt,q1,q2,q3\n"
             "a,s1,1,g1,M,2,0,0,0\n"
             "b,s1,1,g1,F,1,1,0,0\n");
  write_file(dir / "edges.csv", "src,dst,weight\na,b,1\n");
  REQUIRE(run_cli("--out " + (dir / "out").string() + " stats --nodes " +
                  (dir / "nodes.csv").string() + " --edges " + (dir / "edges.csv").string()) == 0);

  auto rows = lines_of(dir / "out" / "relation_types.csv");
  REQUIRE(rows.size() == 2);  // header + the single +1 row
  CHECK(rows[0] == "weight,fraction");
  CHECK(rows[1] == "1,1");
}

TEST_CASE("influence export matches the declared edges") {
  fs::path dir = work_dir() / "influence";
  REQUIRE(run_cli("--out " + (dir / "sim").string() +
                  " simulate --schools 1 --students 30 --degree 8 --seed 3") == 0);
  REQUIRE(run_cli("--out " + (dir / "out").string() + " influence --nodes " +
                  (dir / "sim" / "nodes.csv").string() + " --edges " +
                  (dir / "sim" / "edges.csv").string()) == 0);
  auto edge_rows = lines_of(dir / "sim" / "edges.csv");
  auto influence_rows = lines_of(dir / "out" / "influence.csv");
  CHECK(influence_rows.size() == edge_rows.size());  // same row count (one header each)
  CHECK(influence_rows[0] == "src,dst,weight,influence,two_paths");
}

TEST_CASE("train-local on a planted fixture recovers the rule") {
  fs::path dir = work_dir() / "planted";
  REQUIRE(run_cli("--out " + (dir / "fix").string() +
                  " simulate --planted 120 --theta 5 --eta 0 --seed 8") == 0);
  REQUIRE(fs::exists(dir / "fix" / "planted_labels.csv"));
  REQUIRE(run_cli("--out " + (dir / "run").string() + " train-local --nodes " +
                  (dir / "fix" / "nodes.csv").string() + " --edges " +
                  (dir / "fix" / "edges.csv").string() + " --labels " +
                  (dir / "fix" / "planted_labels.csv").string() +
                  " --predictors influence_only --seeds 10 --seed 5") == 0);

  auto rows = lines_of(dir / "run" / "reports.csv");
  REQUIRE(rows.size() == 11);  // header + one row per seed

  auto summary = lines_of(dir / "run" / "summary.csv");
  REQUIRE(summary.size() == 2);
  double mean_bacc = std::stod(summary[1].substr(0, summary[1].find(',')));
  CHECK(mean_bacc >= 0.95);
}

TEST_CASE("curves artifacts") {
  fs::path dir = work_dir() / "curves";
  REQUIRE(run_cli("--out " + (dir / "sim").string() +
                  " simulate --schools 1 --students 40 --degree 10 --seed 4") == 0);
  REQUIRE(run_cli("--out " + (dir / "out").string() + " curves --nodes " +
                  (dir / "sim" / "nodes.csv").string() + " --edges " +
                  (dir / "sim" / "edges.csv").string() + " --seeds 3 --points 41") == 0);
  auto curve = lines_of(dir / "out" / "curve.csv");
  CHECK(curve.size() == 42);
  auto surface = lines_of(dir / "out" / "surface.csv");
  CHECK(surface.size() == 17);  // header + 4x4 grid
}

TEST_CASE("embed then train-global treatment II yields one report per held-out course") {
  fs::path dir = work_dir() / "global";
  REQUIRE(run_cli("--out " + (dir / "sim").string() +
                  " simulate --schools 2 --courses 2 --students 30 --degree 8 --seed 6") == 0);
  REQUIRE(run_cli("--out " + (dir / "emb").string() + " embed --nodes " +
                  (dir / "sim" / "nodes.csv").string() + " --edges " +
                  (dir / "sim" / "edges.csv").string() +
                  " --walks-per-node 10 --walk-length 8 --dimension 16 --epochs 2 --seed 2") == 0);
  REQUIRE(fs::exists(dir / "emb" / "embeddings.bin"));
  REQUIRE(fs::exists(dir / "emb" / "embeddings.csv"));
  REQUIRE(fs::exists(dir / "emb" / "locality.csv"));

  REQUIRE(run_cli("--out " + (dir / "run").string() + " train-global --nodes " +
                  (dir / "sim" / "nodes.csv").string() + " --edges " +
                  (dir / "sim" / "edges.csv").string() + " --embeddings " +
                  (dir / "emb" / "embeddings.bin").string() +
                  " --model forest --treatment II --runs 1 --trees 15 --seed 3") == 0);
  auto rows = lines_of(dir / "run" / "reports.csv");
  CHECK(rows.size() == 1 + 4);  // header + 2 schools x 2 courses
  REQUIRE(fs::exists(dir / "run" / "histogram.csv"));
}

TEST_CASE("config file and output directory environment variable") {
  fs::path dir = work_dir() / "configfile";
  fs::create_directories(dir);
  write_file(dir / "run.ini",
             "[simulate]\n"
             "schools=1\n"
             "students=30\n"
             "degree=8\n"
             "seed=55\n");
  REQUIRE(run_cli("--out " + (dir / "a").string() + " --config " + (dir / "run.ini").string() +
                  " simulate") == 0);
  REQUIRE(run_cli("--out " + (dir / "b").string() +
                  " simulate --schools 1 --students 30 --degree 8 --seed 55") == 0);
  CHECK(slurp(dir / "a" / "edges.csv") == slurp(dir / "b" / "edges.csv"));

  // SOCNET_OUT supplies the default output directory
  fs::path env_dir = dir / "from_env";
  std::string cmd = "SOCNET_OUT=" + env_dir.string() + " " + kCli +
                    " simulate --schools 1 --students 24 --degree 6 --seed 9 >/dev/null 2>&1";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  CHECK(fs::exists(env_dir / "nodes.csv"));
}

TEST_CASE("reruns from the manifest are byte-identical") {
  fs::path dir = work_dir() / "determinism";
  REQUIRE(run_cli("--out " + (dir / "a").string() +
                  " simulate --schools 1 --students 36 --degree 9 --seed 77") == 0);
  REQUIRE(run_cli("--out " + (dir / "b").string() + " rerun " +
                  (dir / "a" / "manifest.json").string()) == 0);
  for (const char* name : {"nodes.csv", "edges.csv", "manifest.json"}) {
    CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
  }
}
