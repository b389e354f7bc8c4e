/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "ddmm/binding.h"

#include <algorithm>

namespace ddmm {

void
TunnelTable::Add (TunnelEntry e)
{
  if (e.local == e.peer)
    {
      throw std::invalid_argument ("self-tunnel");
    }
  Remove (e.prefix);
  m_entries.insert (e);
}

bool
TunnelTable::Remove (Prefix p)
{
  for (auto it = m_entries.begin (); it != m_entries.end (); ++it)
    {
      if (it->prefix == p)
        {
          m_entries.erase (it);
          return true;
        }
    }
  return false;
}

std::optional<TunnelEntry>
TunnelTable::Find (Prefix p) const
{
  for (const auto &e : m_entries)
    {
      if (e.prefix == p)
        {
          return e;
        }
    }
  return std::nullopt;
}

std::vector<TunnelEntry>
TunnelTable::ForMu (MuId mu) const
{
  std::vector<TunnelEntry> out;
  std::copy_if (m_entries.begin (), m_entries.end (), std::back_inserter (out),
                [mu] (const TunnelEntry &e) { return e.mu == mu; });
  return out;
}

PrefixPool::PrefixPool (std::uint64_t base, std::uint64_t size)
  : m_base (base),
    m_size (size)
{
}

Prefix
PrefixPool::Allocate ()
{
  if (m_used.size () >= m_size)
    {
      throw PoolExhausted ("prefix pool exhausted");
    }
  // Round-robin cursor so released prefixes are not immediately reused.
  for (std::uint64_t i = 0; i < m_size; ++i)
    {
      Prefix p{m_base + (m_next + i) % m_size};
      if (!m_used.count (p))
        {
          m_used.insert (p);
          m_next = (p.value - m_base + 1) % m_size;
          return p;
        }
    }
  throw PoolExhausted ("prefix pool exhausted");
}

void
PrefixPool::Release (Prefix p)
{
  m_used.erase (p);
}

bool
PrefixPool::Owns (Prefix p) const
{
  return p.value >= m_base && p.value < m_base + m_size;
}

} // namespace ddmm
