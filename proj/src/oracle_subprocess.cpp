#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <thread>

#include "pact/errors.hpp"
#include "pact/oracle.hpp"
#include "pact/render.hpp"
#include "pact/sexpr.hpp"

namespace pact {

namespace {

using Clock = std::chrono::steady_clock;

// Script commands forwarded to the solver. Anything else (check-sat,
// get-model, echo, exit, ...) would print or end the session.
bool forwarded(const ScriptCommand& c) {
  static const char* const heads[] = {"set-logic",  "set-info",        "set-option",      "declare-sort",
                                      "define-sort", "declare-fun",    "declare-const",   "define-fun",
                                      "define-fun-rec", "define-funs-rec", "declare-datatype", "declare-datatypes",
                                      "assert",     "push",            "pop"};
  bool known = false;
  for (const char* h : heads) known = known || c.head == h;
  if (!known) return false;
  if (c.head == "set-option") {
    for (const char* opt : {":print-success", ":produce-models", ":regular-output-channel",
                            ":diagnostic-output-channel", ":interactive-mode"}) {
      if (c.text.find(opt) != std::string::npos) return false;
    }
  }
  return true;
}

std::string first_word(const std::string& command) {
  std::istringstream in(command);
  std::string word;
  in >> word;
  return word;
}

bool executable(const std::string& path) { return ::access(path.c_str(), X_OK) == 0; }

bool on_path(const std::string& name) {
  if (name.empty()) return false;
  if (name.find('/') != std::string::npos) return executable(name);
  const char* path = std::getenv("PATH");
  if (!path) return false;
  std::string dirs = path;
  std::size_t start = 0;
  while (start <= dirs.size()) {
    std::size_t colon = dirs.find(':', start);
    if (colon == std::string::npos) colon = dirs.size();
    std::string dir = dirs.substr(start, colon - start);
    if (dir.empty()) dir = ".";
    if (executable(dir + "/" + name)) return true;
    start = colon + 1;
  }
  return false;
}

std::string_view unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '|' && s.back() == '|') return s.substr(1, s.size() - 2);
  return s;
}

[[noreturn]] void bad_literal(const SExpr& e) {
  throw ProtocolError("unreadable bitvector value '" + to_string(e) + "'");
}

// #b..., #x... or (_ bvN w); returns value and literal width.
std::pair<std::uint64_t, unsigned> parse_bv_literal(const SExpr& e) {
  auto fail = [&] { bad_literal(e); };
  if (e.is_atom()) {
    const std::string& a = e.atom;
    if (a.size() < 3 || a[0] != '#') fail();
    const bool bin = a[1] == 'b';
    if (!bin && a[1] != 'x') fail();
    const unsigned per_digit = bin ? 1 : 4;
    std::uint64_t value = 0;
    unsigned width = 0;
    for (std::size_t i = 2; i < a.size(); ++i) {
      int digit = 0;
      const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(a[i])));
      if (c >= '0' && c <= '9') digit = c - '0';
      else if (!bin && c >= 'a' && c <= 'f') digit = 10 + c - 'a';
      else fail();
      if (bin && digit > 1) fail();
      if (value >> (64 - per_digit)) fail();  // would overflow 64 bits
      value = (value << per_digit) | static_cast<std::uint64_t>(digit);
      width += per_digit;
    }
    return {value, width};
  }
  if (e.size() == 3 && e[0].is_atom("_") && e[1].is_atom() && e[1].atom.rfind("bv", 0) == 0 && e[2].is_atom()) {
    try {
      std::size_t used = 0;
      const std::string digits = e[1].atom.substr(2);
      std::uint64_t value = std::stoull(digits, &used);
      if (used == digits.size())
        return {value, static_cast<unsigned>(std::stoul(e[2].atom))};
    } catch (const std::logic_error&) {
    }
  }
  bad_literal(e);
}

}  // namespace

std::string default_solver_command() {
  if (const char* env = std::getenv("PACT_SOLVER_CMD"); env && *env) return env;
  if (on_path("cvc5")) return "cvc5 --incremental --produce-models";
  if (on_path("z3")) return "z3 -in";
  if (on_path("bitwuzla")) return "bitwuzla";
  return "cvc5 --incremental --produce-models";
}

bool solver_available(const std::string& command) { return on_path(first_word(command)); }

SubprocessOracle::SubprocessOracle(const SmtScript& script, ProjectionSet projection, SolverOptions options)
    : Oracle(std::move(projection)), options_(std::move(options)) {
  std::signal(SIGPIPE, SIG_IGN);
  for (const auto& c : script.commands) {
    if (forwarded(c)) prelude_.push_back(c.text);
  }
  frames_.emplace_back();
  if (options_.transcript) transcript_.open(*options_.transcript);
  launch();
  replay();
}

SubprocessOracle::~SubprocessOracle() { shutdown(true); }

void SubprocessOracle::launch() {
  int in_pipe[2], out_pipe[2], err_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) || ::pipe2(out_pipe, O_CLOEXEC) || ::pipe2(err_pipe, O_CLOEXEC)) {
    throw SolverCrashed(std::string("pipe: ") + std::strerror(errno));
  }
  const pid_t pid = ::fork();
  if (pid < 0) throw SolverCrashed(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::dup2(err_pipe[1], STDERR_FILENO);
    ::execl("/bin/sh", "sh", "-c", options_.command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);
  pid_ = pid;
  to_solver_ = in_pipe[1];
  from_solver_ = out_pipe[0];
  solver_err_ = err_pipe[0];
  ::fcntl(solver_err_, F_SETFL, ::fcntl(solver_err_, F_GETFL) | O_NONBLOCK);
  out_buffer_.clear();
  err_buffer_.clear();
  ++launches_;
}

void SubprocessOracle::shutdown(bool graceful) {
  if (pid_ < 0) return;
  if (graceful && to_solver_ >= 0) {
    const char exit_cmd[] = "(exit)\n";
    [[maybe_unused]] auto n = ::write(to_solver_, exit_cmd, sizeof exit_cmd - 1);
  }
  for (int* fd : {&to_solver_, &from_solver_, &solver_err_}) {
    if (*fd >= 0) ::close(*fd);
    *fd = -1;
  }
  int status = 0;
  bool reaped = false;
  if (graceful) {
    for (int i = 0; i < 50 && !reaped; ++i) {
      reaped = ::waitpid(pid_, &status, WNOHANG) == pid_;
      if (!reaped) std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
  }
  if (!reaped) {
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
  }
  pid_ = -1;
}

void SubprocessOracle::replay() {
  expect_success("(set-option :print-success true)");
  expect_success("(set-option :produce-models true)");
  for (const auto& cmd : prelude_) expect_success(cmd);
  for (std::size_t level = 0; level < frames_.size(); ++level) {
    if (level > 0) expect_success("(push 1)");
    for (const auto& a : frames_[level]) expect_success(a);
  }
}

void SubprocessOracle::drain_stderr() {
  if (solver_err_ < 0) return;
  char buf[4096];
  for (;;) {
    const ssize_t n = ::read(solver_err_, buf, sizeof buf);
    if (n == 0) {
      ::close(solver_err_);
      solver_err_ = -1;
      break;
    }
    if (n < 0) break;
    err_buffer_.append(buf, static_cast<std::size_t>(n));
  }
}

void SubprocessOracle::crashed(const std::string& what) {
  drain_stderr();
  std::string msg = "solver '" + options_.command + "': " + what;
  if (!err_buffer_.empty()) msg += "; stderr: " + err_buffer_;
  shutdown(false);
  throw SolverCrashed(msg);
}

void SubprocessOracle::send(const std::string& command) {
  if (transcript_.is_open()) transcript_ << "> " << command << '\n';
  std::string line = command + "\n";
  std::size_t off = 0;
  while (off < line.size()) {
    if (to_solver_ < 0) crashed("process not running");
    const ssize_t n = ::write(to_solver_, line.data() + off, line.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      crashed(std::string("write failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string SubprocessOracle::read_response(std::optional<Clock::time_point> deadline) {
  for (;;) {
    if (auto len = complete_sexpr_length(out_buffer_)) {
      std::string response = out_buffer_.substr(0, *len);
      out_buffer_.erase(0, *len);
      const auto first = response.find_first_not_of(" \t\r\n");
      response.erase(0, first);
      if (transcript_.is_open()) transcript_ << "< " << response << '\n';
      return response;
    }
    pollfd fds[2] = {{from_solver_, POLLIN, 0}, {solver_err_, POLLIN, 0}};
    int wait_ms = -1;
    if (deadline) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(*deadline - Clock::now()).count();
      if (left <= 0) return {};
      wait_ms = static_cast<int>(std::min<long long>(left, 1000 * 60 * 60));
    }
    const int ready = ::poll(fds, 2, wait_ms);
    if (ready < 0) {
      if (errno == EINTR) continue;
      crashed(std::string("poll failed: ") + std::strerror(errno));
    }
    if (ready == 0) continue;  // deadline re-checked above
    if (fds[1].revents & (POLLIN | POLLHUP)) drain_stderr();
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      char buf[8192];
      const ssize_t n = ::read(from_solver_, buf, sizeof buf);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) {
        // a trailing atom without newline is still a complete answer
        if (!out_buffer_.empty() && out_buffer_.find_first_not_of(" \t\r\n") != std::string::npos &&
            out_buffer_.find('(') == std::string::npos) {
          std::string response = out_buffer_;
          out_buffer_.clear();
          return response;
        }
        crashed("process exited unexpectedly");
      }
      out_buffer_.append(buf, static_cast<std::size_t>(n));
    }
  }
}

void SubprocessOracle::expect_success(const std::string& command) {
  send(command);
  const std::string r = read_response(std::nullopt);
  if (r == "success" || r == "unsupported") return;
  crashed("unexpected response to " + command + ": " + r);
}

SatResult SubprocessOracle::check_sat() {
  const auto start = Clock::now();
  ++stats_.check_sat_calls;
  std::optional<Clock::time_point> deadline;
  if (options_.query_timeout) {
    deadline = start + std::chrono::duration_cast<Clock::duration>(*options_.query_timeout);
  }
  send("(check-sat)");
  const std::string r = read_response(deadline);
  stats_.solver_seconds += std::chrono::duration<double>(Clock::now() - start).count();
  if (r.empty()) {
    if (transcript_.is_open()) transcript_ << "; timeout, restarting solver\n";
    shutdown(false);
    launch();
    replay();
    return SatResult::Timeout;
  }
  if (r == "sat") return SatResult::Sat;
  if (r == "unsat") return SatResult::Unsat;
  if (r == "unknown") return SatResult::Unknown;
  crashed("unexpected response to (check-sat): " + r);
}

ProjectedModel SubprocessOracle::projected_model() {
  std::string cmd = "(get-value (";
  for (std::size_t i = 0; i < projection_.size(); ++i) cmd += (i ? " " : "") + projection_[i].name;
  cmd += "))";
  send(cmd);
  const std::string r = read_response(std::nullopt);
  SExpr e;
  try {
    auto parsed = parse_sexprs(r);
    if (parsed.size() != 1) throw ProtocolError("");
    e = std::move(parsed.front());
  } catch (const MalformedScript&) {
    throw ProtocolError("unreadable get-value response: " + r);
  }
  if (!e.is_list) {
    crashed("unexpected response to get-value: " + r);
  }
  if (!e.items.empty() && e[0].is_atom("error")) crashed("get-value failed: " + r);

  ProjectedModel m;
  m.values.assign(projection_.size(), 0);
  std::vector<bool> seen(projection_.size(), false);
  for (const auto& pair : e.items) {
    if (!pair.is_list || pair.size() != 2 || !pair[0].is_atom()) {
      throw ProtocolError("unreadable get-value entry: " + to_string(pair));
    }
    auto idx = projection_.index_of(unquote(pair[0].atom));
    if (!idx) throw ProtocolError("get-value returned unrequested term " + pair[0].atom);
    auto [value, width] = parse_bv_literal(pair[1]);
    if (width != projection_[*idx].width()) {
      throw ProtocolError("value of " + pair[0].atom + " has width " + std::to_string(width) + ", expected " +
                          std::to_string(projection_[*idx].width()));
    }
    m.values[*idx] = value;
    seen[*idx] = true;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) throw ProtocolError("get-value response lacks " + projection_[i].name);
  }
  return m;
}

void SubprocessOracle::push() {
  expect_success("(push 1)");
  frames_.emplace_back();
  ++depth_;
}

void SubprocessOracle::pop() {
  if (depth_ == 0) throw StackUnderflow();
  expect_success("(pop 1)");
  frames_.pop_back();
  --depth_;
}

void SubprocessOracle::assert_text(const std::string& assertion) {
  ++stats_.assertions_sent;
  expect_success(assertion);
  frames_.back().push_back(assertion);
}

void SubprocessOracle::add(const Constraint& c) {
  std::visit([&](const auto& x) { assert_text(render_assertion(x)); }, c);
}

void SubprocessOracle::set_query_timeout(std::optional<std::chrono::duration<double>> limit) {
  options_.query_timeout = limit;
}

}  // namespace pact
