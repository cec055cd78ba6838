#pragma once

#include <chrono>
#include <deque>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

namespace fixture {

/// Local chat-completions endpoint that replays scripted replies and keeps
/// every request body it receives.
class StubServer {
 public:
  struct Reply {
    int status = 200;
    std::string body;
    std::map<std::string, std::string> headers;
    std::chrono::milliseconds delay{0};
  };

  static std::string chat_body(const std::string& content, const std::string& finish = "stop") {
    nlohmann::json j = {{"id", "stub"},
                        {"object", "chat.completion"},
                        {"choices",
                         {{{"index", 0},
                           {"message", {{"role", "assistant"}, {"content", content}}},
                           {"finish_reason", finish}}}}};
    return j.dump();
  }

  StubServer() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      Reply reply;
      {
        std::lock_guard lock(mutex_);
        bodies_.push_back(req.body);
        auth_.push_back(req.get_header_value("Authorization"));
        arrivals_.push_back(std::chrono::steady_clock::now());
        if (!replies_.empty()) {
          reply = replies_.front();
          replies_.pop_front();
        } else {
          reply = fallback_;
        }
      }
      if (reply.delay.count() > 0) std::this_thread::sleep_for(reply.delay);
      res.status = reply.status;
      for (const auto& [k, v] : reply.headers) res.set_header(k, v);
      res.set_content(reply.body, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~StubServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

  void push(Reply r) {
    std::lock_guard lock(mutex_);
    replies_.push_back(std::move(r));
  }
  void set_fallback(Reply r) {
    std::lock_guard lock(mutex_);
    fallback_ = std::move(r);
  }

  std::vector<std::string> bodies() const {
    std::lock_guard lock(mutex_);
    return bodies_;
  }
  std::vector<std::string> auth_headers() const {
    std::lock_guard lock(mutex_);
    return auth_;
  }
  std::vector<std::chrono::steady_clock::time_point> arrivals() const {
    std::lock_guard lock(mutex_);
    return arrivals_;
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  mutable std::mutex mutex_;
  std::deque<Reply> replies_;
  Reply fallback_{200, chat_body("none"), {}, {}};
  std::vector<std::string> bodies_;
  std::vector<std::string> auth_;
  std::vector<std::chrono::steady_clock::time_point> arrivals_;
};

}  // namespace fixture
