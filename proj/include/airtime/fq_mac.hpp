#pragma once

// Per-TID flow queueing for an 802.11 MAC.
//
// A fixed pool of flow queues is shared by every TID. A queue belongs to the
// TID of the first packet hashed into it for as long as it stays active; a
// packet whose queue is held by another TID goes to its own TID's overflow
// queue instead. Each TID runs FQ-CoDel style DRR (new and old lists) over
// the queues it currently owns. One global packet limit is enforced by
// dropping from the longest queue in the whole pool.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <utility>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "airtime/codel.hpp"
#include "airtime/flow_queue.hpp"

namespace airtime::fq {

struct FqConfig
{
  std::size_t num_flow_queues = 1024;
  std::size_t global_limit = 8192; // packets
  std::int64_t quantum = 300;      // bytes
  std::uint64_t hash_seed = 0;
};

struct TidState
{
  std::deque<std::size_t> new_queues;
  std::deque<std::size_t> old_queues;
  std::size_t overflow_queue = 0;
  std::size_t backlog = 0; // packets in queues owned by this TID
  /// Packets waiting in the overflow queue, by the hashed queue they came from.
  std::unordered_map<std::size_t, std::uint32_t> overflow_by_bucket;
};

struct EnqueueReport
{
  bool accepted = true;
  std::size_t queue_index = 0;
  bool diverted_to_overflow = false;
  std::optional<Packet> dropped; // head of the longest queue, on overload
};

inline std::uint64_t
mix64(std::uint64_t x)
{
  // splitmix64 finaliser
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class FqMac
{
public:
  FqMac(FqConfig cfg, std::size_t num_tids)
    : cfg_(cfg)
  {
    if (cfg_.num_flow_queues == 0)
      throw std::invalid_argument("need at least one flow queue");
    if (cfg_.global_limit == 0)
      throw std::invalid_argument("global limit must be positive");
    if (cfg_.quantum <= 0)
      throw std::invalid_argument("quantum must be positive");
    queues_.resize(cfg_.num_flow_queues + num_tids);
    active_.assign(queues_.size(), false);
    indexed_len_.assign(queues_.size(), 0);
    tids_.resize(num_tids);
    for (std::size_t t = 0; t < num_tids; ++t)
    {
      tids_[t].overflow_queue = cfg_.num_flow_queues + t;
      queues_[tids_[t].overflow_queue].owner = static_cast<TidId>(t);
    }
  }

  const FqConfig& config() const { return cfg_; }
  std::size_t num_tids() const { return tids_.size(); }
  std::size_t num_queues() const { return queues_.size(); }
  const FlowQueue& queue(std::size_t i) const { return queues_.at(i); }
  bool is_active(std::size_t i) const { return active_.at(i); }
  const TidState& tid(TidId t) const { return tids_.at(t); }

  std::size_t global_count() const { return global_count_; }
  std::uint64_t overlimit_drops() const { return overlimit_drops_; }
  std::uint64_t codel_drops() const { return codel_drops_; }

  std::size_t hash_queue(std::uint64_t flow_key) const
  {
    return static_cast<std::size_t>(mix64(flow_key ^ mix64(cfg_.hash_seed)) % cfg_.num_flow_queues);
  }

  /// Longest queue by packet count; ties go to the lowest index.
  std::size_t find_longest_queue() const
  {
    return by_length_.empty() ? 0 : by_length_.begin()->second;
  }

  EnqueueReport enqueue(Packet pkt, TidId tid, SimTime now)
  {
    check_tid(tid);
    EnqueueReport report;

    if (global_count_ >= cfg_.global_limit)
    {
      const std::size_t victim = find_longest_queue();
      FlowQueue& vq = queues_[victim];
      if (!vq.empty())
      {
        report.dropped = vq.pop();
        reindex(victim);
        left_queue(victim, *report.dropped);
        ++vq.drops;
        ++overlimit_drops_;
        --global_count_;
        --tids_[*vq.owner].backlog;
      }
    }

    std::size_t idx = hash_queue(pkt.flow_key);
    auto& pending = tids_[tid].overflow_by_bucket;
    if ((queues_[idx].owner && *queues_[idx].owner != tid) || pending.count(idx))
    {
      ++pending[idx];
      idx = tids_[tid].overflow_queue;
      report.diverted_to_overflow = true;
    }
    FlowQueue& q = queues_[idx];
    q.owner = tid;
    pkt.enqueued = now;
    q.push(std::move(pkt));
    reindex(idx);
    ++global_count_;
    ++tids_[tid].backlog;
    if (!active_[idx])
    {
      active_[idx] = true;
      q.deficit = cfg_.quantum;
      tids_[tid].new_queues.push_back(idx);
    }
    report.queue_index = idx;
    return report;
  }

  /// Next packet for `tid`, or nullopt when the TID has nothing queued.
  /// Packets dropped by CoDel are handed to `on_drop`.
  template <typename DropFn>
  std::optional<Packet>
  dequeue(TidId tid, SimTime now, const codel::CodelParams& params, DropFn&& on_drop)
  {
    check_tid(tid);
    TidState& ts = tids_[tid];
    for (;;)
    {
      bool from_new;
      std::size_t idx;
      if (!ts.new_queues.empty())
      {
        idx = ts.new_queues.front();
        from_new = true;
      }
      else if (!ts.old_queues.empty())
      {
        idx = ts.old_queues.front();
        from_new = false;
      }
      else
      {
        return std::nullopt;
      }

      FlowQueue& q = queues_[idx];
      if (q.deficit <= 0)
      {
        q.deficit += cfg_.quantum;
        move_head_to_old(ts, from_new);
        continue;
      }

      auto pkt = codel::codel_dequeue(q, now, params, [&](Packet&& dropped) {
        ++codel_drops_;
        --global_count_;
        --ts.backlog;
        left_queue(idx, dropped);
        on_drop(std::move(dropped));
      });
      reindex(idx);

      if (!pkt)
      {
        if (from_new)
        {
          move_head_to_old(ts, true);
        }
        else
        {
          ts.old_queues.pop_front();
          active_[idx] = false;
          if (idx != ts.overflow_queue)
            q.owner.reset();
        }
        continue;
      }

      --global_count_;
      --ts.backlog;
      left_queue(idx, *pkt);
      q.deficit -= pkt->length;
      ++q.dequeued_packets;
      q.dequeued_bytes += pkt->length;
      return pkt;
    }
  }

  std::optional<Packet> dequeue(TidId tid, SimTime now, const codel::CodelParams& params)
  {
    return dequeue(tid, now, params, [](Packet&&) {});
  }

  std::size_t tid_backlog(TidId tid) const
  {
    check_tid(tid);
    return tids_[tid].backlog;
  }

private:
  void check_tid(TidId tid) const
  {
    if (tid >= tids_.size())
      throw std::out_of_range("unknown TID");
  }

  void left_queue(std::size_t idx, const Packet& p)
  {
    if (idx < cfg_.num_flow_queues)
      return;
    auto& pending = tids_[idx - cfg_.num_flow_queues].overflow_by_bucket;
    auto it = pending.find(hash_queue(p.flow_key));
    if (it != pending.end() && --it->second == 0)
      pending.erase(it);
  }

  // Keeps by_length_ in step with the length of queue `idx`.
  void reindex(std::size_t idx)
  {
    const std::size_t len = queues_[idx].size();
    if (len == indexed_len_[idx])
      return;
    if (indexed_len_[idx] > 0)
      by_length_.erase({indexed_len_[idx], idx});
    if (len > 0)
      by_length_.insert({len, idx});
    indexed_len_[idx] = len;
  }

  struct LongestFirst
  {
    bool operator()(const std::pair<std::size_t, std::size_t>& a, const std::pair<std::size_t, std::size_t>& b) const
    {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    }
  };

  static void move_head_to_old(TidState& ts, bool from_new)
  {
    auto& src = from_new ? ts.new_queues : ts.old_queues;
    const std::size_t idx = src.front();
    src.pop_front();
    ts.old_queues.push_back(idx);
  }

  FqConfig cfg_;
  std::vector<FlowQueue> queues_;
  std::vector<bool> active_;
  std::vector<TidState> tids_;
  std::set<std::pair<std::size_t, std::size_t>, LongestFirst> by_length_; // (length, index)
  std::vector<std::size_t> indexed_len_;
  std::size_t global_count_ = 0;
  std::uint64_t overlimit_drops_ = 0;
  std::uint64_t codel_drops_ = 0;
};

} // namespace airtime::fq
