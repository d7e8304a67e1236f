#include "moments/subprocess.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "moments/types.hpp"

namespace moments::subprocess {

namespace {

std::vector<char*> to_argv(const std::vector<std::string>& args) {
  std::vector<char*> out;
  out.reserve(args.size() + 1);
  for (const auto& a : args) out.push_back(const_cast<char*>(a.c_str()));
  out.push_back(nullptr);
  return out;
}

}  // namespace

Child::Child(const std::vector<std::string>& argv) {
  if (argv.empty()) throw InternalError("subprocess: empty argv");
  int fds[2];
  if (pipe(fds) != 0) throw InternalError("subprocess: pipe() failed");
  const int pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    throw InternalError("subprocess: fork() failed");
  }
  if (pid == 0) {
    close(fds[0]);
    dup2(fds[1], STDOUT_FILENO);
    close(fds[1]);
    auto cargv = to_argv(argv);
    execvp(cargv[0], cargv.data());
    _exit(127);
  }
  close(fds[1]);
  fd_ = fds[0];
  pid_ = pid;
}

Child::~Child() {
  try {
    wait();
  } catch (...) {
  }
}

std::size_t Child::read_full(void* buf, std::size_t n) {
  std::size_t got = 0;
  char* p = static_cast<char*>(buf);
  while (got < n) {
    const ssize_t r = ::read(fd_, p + got, n - got);
    if (r < 0) {
      if (errno == EINTR) continue;
      throw PipeBroken("subprocess: read failed: " + std::string(std::strerror(errno)));
    }
    if (r == 0) break;
    got += static_cast<std::size_t>(r);
  }
  return got;
}

int Child::wait() {
  if (waited_) return exit_code_;
  waited_ = true;
  if (fd_ >= 0) {
    close(fd_);
    fd_ = -1;
  }
  int status = 0;
  while (waitpid(pid_, &status, 0) < 0) {
    if (errno != EINTR) throw InternalError("subprocess: waitpid failed");
  }
  exit_code_ = WIFEXITED(status) ? WEXITSTATUS(status)
                                 : -(WIFSIGNALED(status) ? WTERMSIG(status) : 1);
  return exit_code_;
}

int run(const std::vector<std::string>& argv, std::string* stdout_capture) {
  Child child(argv);
  char buf[4096];
  for (;;) {
    const std::size_t r = child.read_full(buf, sizeof(buf));
    if (stdout_capture) stdout_capture->append(buf, r);
    if (r < sizeof(buf)) break;
  }
  return child.wait();
}

}  // namespace moments::subprocess
