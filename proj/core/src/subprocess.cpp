#include "symplan/engine.hpp"

#include <atomic>
#include <cerrno>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace symplan {

namespace {

using Clock = std::chrono::steady_clock;

// live children, readable from a signal handler
constexpr int kMaxChildren = 256;
std::atomic<int> active_pids[kMaxChildren];
static_assert(std::atomic<int>::is_always_lock_free);

void track(int pid)
{
  for (auto& slot : active_pids) {
    int empty = 0;
    if (slot.compare_exchange_strong(empty, pid)) return;
  }
}

void untrack(int pid)
{
  for (auto& slot : active_pids) {
    int expected = pid;
    if (slot.compare_exchange_strong(expected, 0)) return;
  }
}

struct Child {
  int pid = -1;
  int in = -1;
  int out = -1;
  int err = -1;
};

// /bin/sh -c "exec <command>" in its own process group.
Child spawn(const std::string& command, bool capture_errors)
{
  // nothing may allocate between fork and exec
  const std::string script = "exec " + command;
  int in_pipe[2], out_pipe[2], err_pipe[2] = {-1, -1};
  if (pipe2(in_pipe, O_CLOEXEC) != 0 || pipe2(out_pipe, O_CLOEXEC) != 0 ||
      (capture_errors && pipe2(err_pipe, O_CLOEXEC) != 0))
    throw SolverSpawnError(std::string("pipe: ") + std::strerror(errno));
  pid_t pid = fork();
  if (pid < 0) throw SolverSpawnError(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    setpgid(0, 0);
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    if (capture_errors) dup2(err_pipe[1], STDERR_FILENO);
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1], err_pipe[0], err_pipe[1]})
      if (fd >= 0) close(fd);
    execl("/bin/sh", "sh", "-c", script.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);
  track(pid);
  close(in_pipe[0]);
  close(out_pipe[1]);
  if (capture_errors) close(err_pipe[1]);
  signal(SIGPIPE, SIG_IGN);
  return {pid, in_pipe[1], out_pipe[0], err_pipe[0]};
}

int remaining_ms(Clock::time_point deadline, bool has_deadline)
{
  if (!has_deadline) return -1;
  auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
  return left > 0 ? static_cast<int>(left) : 0;
}

void kill_group(int pid)
{
  kill(-pid, SIGKILL);
  kill(pid, SIGKILL);
}

int reap(int pid)
{
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  untrack(pid);
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
  return -1;
}

}  // namespace

void kill_active_solvers() noexcept
{
  for (auto& slot : active_pids)
    if (int pid = slot.load(); pid > 0) kill_group(pid);
}

RawAnswer run_query(const SolverConfig& cfg, const std::string& smtlib)
{
  const auto start = Clock::now();
  const bool has_deadline = cfg.timeout_seconds > 0;
  const auto deadline = start + std::chrono::duration_cast<Clock::duration>(
                                    std::chrono::duration<double>(has_deadline ? cfg.timeout_seconds : 0));
  Child child = spawn(cfg.command, true);
  fcntl(child.in, F_SETFL, O_NONBLOCK);

  RawAnswer answer;
  std::size_t written = 0;
  bool out_open = true, err_open = true;
  char buf[65536];
  while (out_open || err_open) {
    std::vector<pollfd> fds;
    if (child.in >= 0) fds.push_back({child.in, POLLOUT, 0});
    if (out_open) fds.push_back({child.out, POLLIN, 0});
    if (err_open) fds.push_back({child.err, POLLIN, 0});
    int ready = poll(fds.data(), fds.size(), remaining_ms(deadline, has_deadline));
    if (ready < 0 && errno == EINTR) continue;
    if (ready == 0) {
      answer.timed_out = true;
      kill_group(child.pid);
      break;
    }
    for (const auto& p : fds) {
      if (!p.revents) continue;
      if (p.fd == child.in) {
        ssize_t n = write(child.in, smtlib.data() + written, smtlib.size() - written);
        if (n > 0) written += static_cast<std::size_t>(n);
        if (n < 0 && errno != EAGAIN) written = smtlib.size();  // solver closed its input
        if (written == smtlib.size()) {
          close(child.in);
          child.in = -1;
        }
        continue;
      }
      ssize_t n = read(p.fd, buf, sizeof buf);
      if (n > 0) {
        (p.fd == child.out ? answer.output : answer.errors).append(buf, static_cast<std::size_t>(n));
      } else if (n == 0 || errno != EAGAIN) {
        (p.fd == child.out ? out_open : err_open) = false;
      }
    }
  }
  if (child.in >= 0) close(child.in);
  close(child.out);
  close(child.err);
  answer.exit_status = reap(child.pid);
  answer.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (!answer.timed_out && answer.exit_status == 127 && answer.output.empty()) {
    std::string why = answer.errors.substr(0, answer.errors.find_last_not_of(" \r\n") + 1);
    throw SolverSpawnError("cannot run solver command '" + cfg.command + "': " + why);
  }
  return answer;
}

SolverSession::SolverSession(const SolverConfig& cfg)
{
  Child child = spawn(cfg.command, false);
  pid_ = child.pid;
  in_ = child.in;
  out_ = child.out;
}

SolverSession::~SolverSession()
{
  if (pid_ <= 0) return;
  try {
    send("(exit)\n");
  } catch (const SolverProtocolError&) {
  }
  kill_process();
}

void SolverSession::kill_process()
{
  if (pid_ <= 0) return;
  close(in_);
  close(out_);
  kill_group(pid_);
  reap(pid_);
  pid_ = -1;
}

void SolverSession::send(const std::string& text)
{
  if (pid_ <= 0) throw SolverProtocolError("solver session is closed", "");
  std::size_t done = 0;
  while (done < text.size()) {
    ssize_t n = write(in_, text.data() + done, text.size() - done);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw SolverProtocolError("solver closed its input", buffer_);
    done += static_cast<std::size_t>(n);
  }
}

std::optional<std::string> SolverSession::exchange(const std::string& text, double timeout_seconds)
{
  const std::string marker = "symplan-done-" + std::to_string(++counter_);
  send(text + "(echo \"" + marker + "\")\n");
  const bool has_deadline = timeout_seconds > 0;
  const auto deadline =
      Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(timeout_seconds));
  char buf[65536];
  while (true) {
    if (auto pos = buffer_.find(marker + "\n"); pos != std::string::npos) {
      std::string out = buffer_.substr(0, pos);
      buffer_.erase(0, pos + marker.size() + 1);
      return out;
    }
    pollfd p{out_, POLLIN, 0};
    int ready = poll(&p, 1, remaining_ms(deadline, has_deadline));
    if (ready < 0 && errno == EINTR) continue;
    if (ready == 0) {
      kill_process();
      return std::nullopt;
    }
    ssize_t n = read(out_, buf, sizeof buf);
    if (n <= 0) {
      std::string seen = buffer_;
      kill_process();
      throw SolverProtocolError("solver exited during an incremental session", seen);
    }
    buffer_.append(buf, static_cast<std::size_t>(n));
  }
}

}  // namespace symplan
