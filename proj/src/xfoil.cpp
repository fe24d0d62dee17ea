#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include "foilgan/aero.hpp"

namespace foilgan {

namespace fs = std::filesystem;

void write_coordinate_file(const fs::path& path, const AirfoilShape& shape, const std::string& name) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write coordinate file " + path.string());
  out << name << '\n';
  char line[96];
  for (std::size_t i = 0; i < shape.size(); ++i) {
    std::snprintf(line, sizeof line, "%.10g %.10g\n", shape.x(i), shape.y(i));
    out << line;
  }
  if (!out) throw std::runtime_error("failed writing coordinate file " + path.string());
}

AirfoilShape read_coordinate_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open coordinate file " + path.string());
  std::vector<double> xs;
  std::vector<double> ys;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::istringstream is(line);
    double x = 0.0;
    double y = 0.0;
    if (is >> x >> y) {
      xs.push_back(x);
      ys.push_back(y);
    } else if (!first && !line.empty()) {
      throw std::runtime_error("malformed coordinate line in " + path.string() + ": " + line);
    }
    first = false;
  }
  return AirfoilShape(xs, ys);
}

ClResult parse_xfoil_output(const std::string& output) {
  if (output.find("Convergence failed") != std::string::npos) {
    return ClResult::failure({"xfoil convergence failed"});
  }
  const auto pos = output.rfind("CL =");
  if (pos == std::string::npos) return ClResult::failure({"no CL in xfoil output"});
  const char* start = output.c_str() + pos + 4;
  char* end = nullptr;
  const double cl = std::strtod(start, &end);
  if (end == start || !std::isfinite(cl)) return ClResult::failure({"unparseable CL in xfoil output"});
  return ClResult::success(cl);
}

namespace {

// Removes the directory on scope exit.
class TempDir {
 public:
  TempDir() {
    std::string templ = (fs::temp_directory_path() / "foilgan-xfoil-XXXXXX").string();
    if (::mkdtemp(templ.data()) == nullptr) throw std::runtime_error("mkdtemp failed: " + std::string(std::strerror(errno)));
    path_ = templ;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

enum class RunOutcome { exited, crashed, timed_out, spawn_failed };

RunOutcome run_with_timeout(const fs::path& exe, const fs::path& workdir, const fs::path& stdin_file,
                            const fs::path& stdout_file, std::chrono::duration<double> timeout) {
  const pid_t pid = ::fork();
  if (pid < 0) return RunOutcome::spawn_failed;
  if (pid == 0) {
    if (::chdir(workdir.c_str()) != 0) ::_exit(127);
    const int in = ::open(stdin_file.c_str(), O_RDONLY);
    const int out = ::open(stdout_file.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (in < 0 || out < 0) ::_exit(127);
    ::dup2(in, STDIN_FILENO);
    ::dup2(out, STDOUT_FILENO);
    ::dup2(out, STDERR_FILENO);
    ::setpgid(0, 0);
    const std::string exe_str = exe.string();
    char* argv[] = {const_cast<char*>(exe_str.c_str()), nullptr};
    ::execv(exe_str.c_str(), argv);
    ::_exit(127);
  }

  const auto deadline = std::chrono::steady_clock::now() + timeout;
  int status = 0;
  while (true) {
    const pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR) return RunOutcome::crashed;
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      return RunOutcome::timed_out;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  if (WIFSIGNALED(status)) return RunOutcome::crashed;
  if (WIFEXITED(status) && WEXITSTATUS(status) == 127) return RunOutcome::spawn_failed;
  return RunOutcome::exited;
}

bool is_runnable(const fs::path& exe) {
  std::error_code ec;
  return !exe.empty() && fs::is_regular_file(exe, ec) && ::access(exe.c_str(), X_OK) == 0;
}

}  // namespace

ClResult xfoil_cl(const AirfoilShape& shape, const FlowCondition& cond, const XfoilOptions& options) {
  if (!is_runnable(options.executable)) {
    throw SolverConfigError("xfoil executable not found or not executable: '" + options.executable.string() + "'");
  }
  cond.validate();

  TempDir dir;
  write_coordinate_file(dir.path() / "foil.dat", shape, "foilgan");
  {
    std::ofstream cmd(dir.path() / "commands.in");
    cmd << "PLOP\nG F\n\n";
    cmd << "LOAD foil.dat\n";
    cmd << "OPER\n";
    if (options.viscous) cmd << "VISC " << cond.reynolds << '\n';
    cmd << "ITER " << options.iterations << '\n';
    cmd << "ALFA " << cond.alpha_deg << '\n';
    cmd << "\nQUIT\n";
  }

  const RunOutcome outcome =
      run_with_timeout(options.executable, dir.path(), dir.path() / "commands.in", dir.path() / "console.out", options.timeout);
  switch (outcome) {
    case RunOutcome::timed_out: return ClResult::failure({"timeout"});
    case RunOutcome::crashed: return ClResult::failure({"xfoil crashed"});
    case RunOutcome::spawn_failed: throw SolverConfigError("failed to launch " + options.executable.string());
    case RunOutcome::exited: break;
  }

  std::ifstream in(dir.path() / "console.out");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_xfoil_output(buffer.str());
}

XfoilBackend::XfoilBackend(XfoilOptions options) : options_(std::move(options)) {
  if (!is_runnable(options_.executable)) {
    throw SolverConfigError("xfoil executable not found or not executable: '" + options_.executable.string() + "'");
  }
}

std::unique_ptr<ClBackend> make_backend(const std::string& name, const XfoilOptions& xfoil) {
  if (name == "panel") return std::make_unique<PanelBackend>();
  if (name == "xfoil") {
    XfoilOptions options = xfoil;
    if (options.executable.empty()) {
      if (const char* env = std::getenv(kXfoilEnvVar)) options.executable = env;
    }
    if (options.executable.empty()) {
      throw SolverConfigError(std::string("xfoil backend requires an executable path (flag or ") + kXfoilEnvVar + ")");
    }
    return std::make_unique<XfoilBackend>(std::move(options));
  }
  throw std::invalid_argument("unknown CL backend '" + name + "' (expected panel or xfoil)");
}

}  // namespace foilgan
