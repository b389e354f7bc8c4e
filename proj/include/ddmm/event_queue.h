/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef DDMM_EVENT_QUEUE_H
#define DDMM_EVENT_QUEUE_H

#include <cstdint>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ddmm {

/**
 * \brief Time-ordered event queue. Events with equal timestamps leave in
 * insertion order.
 */
template <typename Event>
class EventQueue
{
public:
  /// Throws std::logic_error when t lies before the last dequeued time.
  void
  Schedule (double t, Event ev)
  {
    if (t < m_now)
      {
        throw std::logic_error ("event scheduled in the past");
      }
    m_heap.push ({t, m_seq++, std::move (ev)});
  }

  bool Empty () const { return m_heap.empty (); }
  std::size_t Size () const { return m_heap.size (); }
  double Now () const { return m_now; }
  double NextTime () const { return m_heap.top ().t; }

  std::pair<double, Event>
  Pop ()
  {
    Item it = std::move (const_cast<Item &> (m_heap.top ()));
    m_heap.pop ();
    m_now = it.t;
    return {it.t, std::move (it.ev)};
  }

private:
  struct Item
  {
    double t;
    std::uint64_t seq;
    Event ev;
  };
  struct Later
  {
    bool
    operator() (const Item &a, const Item &b) const
    {
      return a.t > b.t || (a.t == b.t && a.seq > b.seq);
    }
  };

  std::priority_queue<Item, std::vector<Item>, Later> m_heap;
  std::uint64_t m_seq = 0;
  double m_now = 0.0;
};

} // namespace ddmm

#endif // DDMM_EVENT_QUEUE_H
