#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace cliniline {

/// Change notification. Carries ids only; clients refetch what they show.
struct ChangeEvent {
  std::string type;  // "task-validated" | "data-ingested"
  std::string entity_id;
  std::uint64_t revision = 0;

  bool operator==(const ChangeEvent&) const = default;
};

class Subscription {
 public:
  explicit Subscription(std::uint64_t joined_at) : joined_at_(joined_at) {}

  std::uint64_t joined_at() const { return joined_at_; }

  /// Next queued event, or nullopt on timeout or once closed and drained.
  std::optional<ChangeEvent> next(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, timeout, [&] { return closed_ || !queue_.empty(); });
    if (queue_.empty()) return std::nullopt;
    ChangeEvent ev = std::move(queue_.front());
    queue_.pop_front();
    return ev;
  }

  bool closed() const {
    std::lock_guard lock(mu_);
    return closed_ && queue_.empty();
  }

  void push(const ChangeEvent& ev) {
    {
      std::lock_guard lock(mu_);
      if (closed_) return;
      queue_.push_back(ev);
    }
    cv_.notify_one();
  }

  void close() {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
    }
    cv_.notify_all();
  }

 private:
  std::uint64_t joined_at_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<ChangeEvent> queue_;
  bool closed_ = false;
};

/// Fan-out of change events to live subscribers. No replay: a subscriber
/// only sees events published after it joined. Publishing never waits on a
/// subscriber.
class EventHub {
 public:
  explicit EventHub(std::uint64_t revision = 0) : last_revision_(revision) {}

  std::shared_ptr<Subscription> subscribe() {
    std::lock_guard lock(mu_);
    auto sub = std::make_shared<Subscription>(last_revision_);
    subs_.push_back(sub);
    if (shut_down_) sub->close();
    return sub;
  }

  void unsubscribe(const std::shared_ptr<Subscription>& sub) {
    std::lock_guard lock(mu_);
    std::erase(subs_, sub);
  }

  void publish(const ChangeEvent& ev) {
    std::lock_guard lock(mu_);
    last_revision_ = ev.revision;
    for (auto& s : subs_) s->push(ev);
  }

  /// Closes every stream; later subscriptions start closed.
  void shutdown() {
    std::lock_guard lock(mu_);
    shut_down_ = true;
    for (auto& s : subs_) s->close();
  }

  std::size_t subscriber_count() const {
    std::lock_guard lock(mu_);
    return subs_.size();
  }

 private:
  mutable std::mutex mu_;
  std::vector<std::shared_ptr<Subscription>> subs_;
  std::uint64_t last_revision_ = 0;
  bool shut_down_ = false;
};

}  // namespace cliniline
