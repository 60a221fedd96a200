#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <mutex>
#include <sstream>

#include "falsify/models.hpp"

namespace falsify::models {

namespace {

const double kNoTime = std::nan("");

// Owns a file descriptor.
class Fd {
 public:
  explicit Fd(int fd = -1) : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() { reset(); }

  int get() const { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_;
};

[[noreturn]] void sys_fail(const std::string& what) {
  throw SimulationError("external model: " + what + ": " + std::strerror(errno), kNoTime);
}

struct ChildResult {
  std::string out;
  std::string err;
  int status = 0;
};

ChildResult run_child(const std::string& command, const std::string& input,
                      std::chrono::milliseconds timeout) {
  // A child that exits without reading stdin must not kill us with SIGPIPE.
  static std::once_flag ignore_sigpipe;
  std::call_once(ignore_sigpipe, [] { ::signal(SIGPIPE, SIG_IGN); });

  int in_pipe[2], out_pipe[2], err_pipe[2];
  if (::pipe(in_pipe) != 0) sys_fail("pipe");
  Fd in_r(in_pipe[0]), in_w(in_pipe[1]);
  if (::pipe(out_pipe) != 0) sys_fail("pipe");
  Fd out_r(out_pipe[0]), out_w(out_pipe[1]);
  if (::pipe(err_pipe) != 0) sys_fail("pipe");
  Fd err_r(err_pipe[0]), err_w(err_pipe[1]);

  const pid_t pid = ::fork();
  if (pid < 0) sys_fail("fork");
  if (pid == 0) {
    ::dup2(in_r.get(), STDIN_FILENO);
    ::dup2(out_w.get(), STDOUT_FILENO);
    ::dup2(err_w.get(), STDERR_FILENO);
    for (int fd : {in_r.get(), in_w.get(), out_r.get(), out_w.get(), err_r.get(), err_w.get()}) {
      ::close(fd);
    }
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  in_r.reset();
  out_w.reset();
  err_w.reset();
  ::fcntl(in_w.get(), F_SETFL, O_NONBLOCK);

  ChildResult result;
  std::size_t written = 0;
  if (input.empty()) in_w.reset();
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  bool out_open = true, err_open = true;
  char buf[4096];
  while (out_open || err_open) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      ::kill(pid, SIGKILL);
      ::waitpid(pid, nullptr, 0);
      throw SimulationError("external model: timed out after " +
                                std::to_string(timeout.count()) + " ms",
                            kNoTime);
    }
    pollfd fds[3];
    nfds_t nfds = 0;
    int out_i = -1, err_i = -1, in_i = -1;
    if (out_open) { out_i = static_cast<int>(nfds); fds[nfds++] = {out_r.get(), POLLIN, 0}; }
    if (err_open) { err_i = static_cast<int>(nfds); fds[nfds++] = {err_r.get(), POLLIN, 0}; }
    if (in_w.get() >= 0) { in_i = static_cast<int>(nfds); fds[nfds++] = {in_w.get(), POLLOUT, 0}; }
    const int rc = ::poll(fds, nfds, static_cast<int>(left.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      sys_fail("poll");
    }
    if (in_i >= 0 && (fds[in_i].revents & (POLLOUT | POLLERR | POLLHUP))) {
      const ssize_t n = ::write(in_w.get(), input.data() + written, input.size() - written);
      if (n > 0) written += static_cast<std::size_t>(n);
      if (n < 0 && errno != EAGAIN) written = input.size();  // child closed stdin
      if (written == input.size()) in_w.reset();
    }
    auto drain = [&](int idx, const Fd& fd, std::string& sink, bool& open) {
      if (idx < 0 || !(fds[idx].revents & (POLLIN | POLLHUP | POLLERR))) return;
      const ssize_t n = ::read(fd.get(), buf, sizeof buf);
      if (n > 0) sink.append(buf, static_cast<std::size_t>(n));
      else if (n == 0 || errno != EAGAIN) open = false;
    };
    drain(out_i, out_r, result.out, out_open);
    drain(err_i, err_r, result.err, err_open);
  }
  in_w.reset();
  ::waitpid(pid, &result.status, 0);
  return result;
}

}  // namespace

ExternalModel::ExternalModel(ExternalModelSpec spec) : spec_(std::move(spec)) {
  if (spec_.command.empty()) throw std::invalid_argument("external model: empty command");
  if (spec_.inputs.empty() || spec_.outputs.empty()) {
    throw std::invalid_argument("external model: inputs and outputs must be declared");
  }
  for (const auto& r : spec_.inputs) {
    if (!(r.lo < r.hi)) throw std::invalid_argument("external model: empty range for " + r.name);
  }
  if (!(spec_.horizon > 0.0)) throw std::invalid_argument("external model: horizon must be > 0");
}

Signal ExternalModel::run(const Signal& u) const {
  std::ostringstream in;
  write_csv(in, Signal([&] {
    std::vector<std::string> names;
    for (const auto& r : spec_.inputs) names.push_back(r.name);
    return names;
  }(), u.step(), std::vector<double>(u.values().begin(), u.values().end())));

  const ChildResult r = run_child(spec_.command, in.str(), spec_.timeout);
  if (!WIFEXITED(r.status) || WEXITSTATUS(r.status) != 0) {
    throw SimulationError("external model: command failed: " + r.err, kNoTime);
  }
  std::istringstream out(r.out);
  Signal y = [&] {
    try {
      return read_csv(out);
    } catch (const std::invalid_argument& e) {
      throw SimulationError(std::string("external model: bad output: ") + e.what(), kNoTime);
    }
  }();
  if (y.var_names() != spec_.outputs) {
    throw SimulationError("external model: output columns do not match the declared outputs",
                          kNoTime);
  }
  if (y.size() != u.size() || std::abs(y.step() - u.step()) > 1e-6 * u.step()) {
    throw SimulationError("external model: output grid differs from input grid", kNoTime);
  }
  return Signal(spec_.outputs, u.step(), std::vector<double>(y.values().begin(), y.values().end()));
}

}  // namespace falsify::models
