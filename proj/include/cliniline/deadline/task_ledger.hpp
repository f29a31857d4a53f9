#pragma once

#include <map>
#include <string>
#include <vector>

#include "cliniline/deadline/engine.hpp"

namespace cliniline {

/// Task instances keyed by id.
class TaskLedger {
 public:
  const TaskInstance* find(const std::string& id) const {
    auto it = tasks_.find(id);
    return it == tasks_.end() ? nullptr : &it->second;
  }

  const std::map<std::string, TaskInstance>& all() const { return tasks_; }
  std::size_t size() const { return tasks_.size(); }

  void put(TaskInstance task) {
    auto id = task.id;
    tasks_.insert_or_assign(std::move(id), std::move(task));
  }

  /// Replaces every task of `measure_id` with `fresh`. Tasks that keep their
  /// id keep their completion state.
  void replace_for_measure(const std::string& measure_id, std::vector<TaskInstance> fresh) {
    std::map<std::string, TaskInstance> kept;
    for (auto it = tasks_.begin(); it != tasks_.end();) {
      if (it->second.measure_id == measure_id) {
        kept.insert(tasks_.extract(it++));
      } else {
        ++it;
      }
    }
    for (auto& t : fresh) {
      if (auto old = kept.find(t.id);
          old != kept.end() && old->second.status == TaskStatus::kCompleted) {
        t.status = TaskStatus::kCompleted;
        t.completed_at = old->second.completed_at;
        t.completed_by = old->second.completed_by;
      }
      put(std::move(t));
    }
  }

  bool operator==(const TaskLedger&) const = default;

 private:
  std::map<std::string, TaskInstance> tasks_;
};

/// Marks a pending task completed. Only the named task changes.
inline TaskInstance validate_task(TaskLedger& ledger, const std::string& id,
                                  const Profession& actor, Instant at) {
  const TaskInstance* current = ledger.find(id);
  if (current == nullptr) throw Error(ErrorCode::kNotFound, "unknown task '" + id + "'");
  if (current->status == TaskStatus::kCompleted) {
    throw Error(ErrorCode::kAlreadyCompleted, "task '" + id + "' is already completed");
  }
  TaskInstance done = *current;
  done.status = TaskStatus::kCompleted;
  done.completed_at = at;
  done.completed_by = actor;
  ledger.put(done);
  return done;
}

}  // namespace cliniline
