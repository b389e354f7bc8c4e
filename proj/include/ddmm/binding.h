/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef DDMM_BINDING_H
#define DDMM_BINDING_H

#include "ddmm/message.h"

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

namespace ddmm {

enum class BceState
{
  TEMPORAL,
  CONFIRMED
};

/// Mobility session record, kept by the LBS and by the serving zone.
struct BindingCacheEntry
{
  MuId mu_id = 0;
  Prefix lnp;
  NodeId serving_mz = 0;
  std::vector<AnchorRef> anchored; // handover order, no duplicate prefixes
  double created_at = 0.0;
  BceState state = BceState::TEMPORAL;

  bool operator== (const BindingCacheEntry &) const = default;
};

struct TunnelEntry
{
  NodeId local;
  NodeId peer;
  Prefix prefix;
  MuId mu;
  auto operator<=> (const TunnelEntry &) const = default;
};

/// Bidirectional tunnels terminated at one zone, one per prefix.
class TunnelTable
{
public:
  /// Replaces any tunnel for the same prefix. Throws on local == peer.
  void Add (TunnelEntry e);
  bool Remove (Prefix p);
  std::optional<TunnelEntry> Find (Prefix p) const;
  std::vector<TunnelEntry> ForMu (MuId mu) const;
  const std::set<TunnelEntry> &Entries () const { return m_entries; }
  std::size_t Size () const { return m_entries.size (); }

private:
  std::set<TunnelEntry> m_entries;
};

class PoolExhausted : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Contiguous block of assignable prefixes owned by one zone.
class PrefixPool
{
public:
  PrefixPool () = default;
  PrefixPool (std::uint64_t base, std::uint64_t size);

  /// Lowest free prefix; throws PoolExhausted.
  Prefix Allocate ();
  void Release (Prefix p);
  bool Owns (Prefix p) const;
  bool InUse (Prefix p) const { return m_used.count (p) != 0; }
  std::size_t Available () const { return m_size - m_used.size (); }
  std::uint64_t Base () const { return m_base; }
  std::uint64_t Size () const { return m_size; }

private:
  std::uint64_t m_base = 0;
  std::uint64_t m_size = 0;
  std::uint64_t m_next = 0; // allocation cursor
  std::set<Prefix> m_used;
};

} // namespace ddmm

#endif // DDMM_BINDING_H
