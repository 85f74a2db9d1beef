"""Three places to put a MEC server, built and composed.

Each structure is a small topology: MTDs on the ground, one satellite, one
gateway and a cloud. Only the server location changes.
"""

from satmec.model import reachable_servers, validate_topology
from satmec.structures import StructureKind, StructureSpec, build_structure, compose

for kind in StructureKind:
    t = build_structure(StructureSpec(kind, n_mtds=2, prefix=f"{kind.name.lower()}_"))
    assert validate_topology(t) == []
    mtd = t.mtds[0].id
    print(f"{kind.value}:")
    for server, route in reachable_servers(t, mtd):
        hops = " -> ".join([route[0].src] + [link.dst for link in route])
        print(f"  {server:>28s}  via {hops}")

# Disjoint structures compose into one network; node ids must not collide.
parts = [build_structure(StructureSpec(k, prefix=f"p{i}_")) for i, k in enumerate(StructureKind)]
net = compose(parts)
print(f"\ncomposed network: {len(net.nodes)} nodes, {len(net.links)} links, tags {net.structure_tags}")
