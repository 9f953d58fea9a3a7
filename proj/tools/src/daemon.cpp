#include "cerberus/tools/daemon.hpp"

#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

extern char** environ;

namespace cerberus::tools {

namespace {

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

}  // namespace

DaemonProcess::DaemonProcess(const std::filesystem::path& exe, const std::vector<std::string>& args,
                             std::chrono::milliseconds startup_timeout) {
  int fds[2];
  if (::pipe(fds) != 0) throw Error(std::string("pipe: ") + std::strerror(errno));
  int read_fd = fds[0];
  int write_fd = fds[1];

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, write_fd, STDOUT_FILENO);
  posix_spawn_file_actions_addclose(&actions, read_fd);
  posix_spawn_file_actions_addclose(&actions, write_fd);

  std::vector<std::string> argv_storage{exe.string()};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  argv.push_back(nullptr);

  const int rc = ::posix_spawn(&pid_, exe.c_str(), &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  close_fd(write_fd);
  if (rc != 0) {
    close_fd(read_fd);
    pid_ = -1;
    throw Error("cannot start " + exe.string() + ": " + std::strerror(rc));
  }

  std::string line;
  const auto until = std::chrono::steady_clock::now() + startup_timeout;
  bool ready = false;
  while (!ready) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(until - std::chrono::steady_clock::now());
    if (left.count() <= 0) break;
    pollfd p{read_fd, POLLIN, 0};
    if (::poll(&p, 1, static_cast<int>(left.count())) <= 0) continue;
    char c;
    const ssize_t got = ::read(read_fd, &c, 1);
    if (got <= 0) break;  // EOF: the child exited or closed stdout
    if (c != '\n') {
      line.push_back(c);
      continue;
    }
    if (auto at = line.find(kReadyPrefix); at != std::string::npos) {
      address_ = line.substr(at + kReadyPrefix.size());
      ready = true;
    }
    line.clear();
  }
  // The daemon ignores SIGPIPE, so later writes to a closed stdout are harmless.
  close_fd(read_fd);
  if (!ready) {
    stop();
    throw Error("moderator process did not become ready: " + exe.string());
  }
}

DaemonProcess::~DaemonProcess() { stop(); }

int DaemonProcess::stop() {
  if (pid_ <= 0) return -1;
  ::kill(pid_, SIGTERM);
  int status = 0;
  for (int i = 0; i < 300; ++i) {
    const pid_t r = ::waitpid(pid_, &status, WNOHANG);
    if (r == pid_ || (r < 0 && errno == ECHILD)) {
      pid_ = -1;
      return status;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  ::kill(pid_, SIGKILL);
  ::waitpid(pid_, &status, 0);
  pid_ = -1;
  return status;
}

}  // namespace cerberus::tools
