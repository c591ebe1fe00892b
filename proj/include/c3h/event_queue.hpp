#pragma once

#include <cstddef>
#include <cstdint>
#include <queue>
#include <vector>

namespace c3h
{

/// Time-ordered queue. Events at equal times pop in insertion order.
template <class Payload>
class EventQueue
{
  public:
    struct Entry
    {
        double time = 0.0;
        std::uint64_t seq = 0;
        Payload payload;
    };

    void push(double time, Payload payload) { m_heap.push(Entry{time, m_next++, std::move(payload)}); }

    Entry pop()
    {
        Entry top = m_heap.top();
        m_heap.pop();
        return top;
    }

    const Entry& top() const { return m_heap.top(); }
    bool empty() const { return m_heap.empty(); }
    std::size_t size() const { return m_heap.size(); }

  private:
    struct Later
    {
        bool operator()(const Entry& a, const Entry& b) const
        {
            if (a.time != b.time)
            {
                return a.time > b.time;
            }
            return a.seq > b.seq;
        }
    };

    std::priority_queue<Entry, std::vector<Entry>, Later> m_heap;
    std::uint64_t m_next = 0;
};

} // namespace c3h
