#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace dexsim {

// Unbounded MPSC-friendly queue. Producers push from any thread; the single
// consumer pops in push order, which is what gives the matching loop its
// total event order.
template <typename T>
class EventQueue {
 public:
  void push(T item) {
    {
      std::lock_guard<std::mutex> lk(m_);
      q_.push_back(std::move(item));
    }
    cv_.notify_one();
  }

  // Push and return the 1-based admission index of the pushed item. Stamping
  // happens under the queue lock, so two producers can never tie.
  std::int64_t push_stamped(T item) {
    std::int64_t seq;
    {
      std::lock_guard<std::mutex> lk(m_);
      seq = ++stamp_;
      q_.push_back(std::move(item));
    }
    cv_.notify_one();
    return seq;
  }

  // Like push_stamped, but lets the caller record the admission index inside
  // the item itself while the queue lock is still held.
  template <typename F>
  std::int64_t push_stamping(T item, F&& stamp) {
    std::int64_t seq;
    {
      std::lock_guard<std::mutex> lk(m_);
      seq = ++stamp_;
      stamp(item, seq);
      q_.push_back(std::move(item));
    }
    cv_.notify_one();
    return seq;
  }

  std::optional<T> pop(std::chrono::milliseconds timeout) {
    std::unique_lock<std::mutex> lk(m_);
    if (!cv_.wait_for(lk, timeout, [&] { return !q_.empty() || closed_; })) return std::nullopt;
    if (q_.empty()) return std::nullopt;
    T item = std::move(q_.front());
    q_.pop_front();
    return item;
  }

  std::optional<T> try_pop() {
    std::lock_guard<std::mutex> lk(m_);
    if (q_.empty()) return std::nullopt;
    T item = std::move(q_.front());
    q_.pop_front();
    return item;
  }

  void close() {
    {
      std::lock_guard<std::mutex> lk(m_);
      closed_ = true;
    }
    cv_.notify_all();
  }

  bool closed() const {
    std::lock_guard<std::mutex> lk(m_);
    return closed_;
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lk(m_);
    return q_.size();
  }

 private:
  mutable std::mutex m_;
  std::condition_variable cv_;
  std::deque<T> q_;
  std::int64_t stamp_ = 0;
  bool closed_ = false;
};

inline std::vector<std::string> split(const std::string& s, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(delim, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace dexsim
