use serde::{Deserialize, Serialize};

use super::{ClassicalDatabase, QramLayout};
use crate::error::Result;
use crate::gates::{GateSpec, GateTimes};

/// The operation performed in one clock cycle. Every cycle applies a single
/// gate kind to disjoint modes, so its duration is that gate's duration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CycleOp {
    /// SWAP address qubit k − 1 into the first router of level k − 1.
    Load { k: usize },
    /// Routers of `level` steer the qubit travelling through level k − 1.
    RouteAddress { k: usize, level: usize },
    /// Balanced rotation of the bus before and after the query.
    BusHadamard,
    /// Routers of `level` steer the bus across the slots.
    RouteBus { level: usize },
    /// Data-dependent phase on the slot reached below each last-level router.
    Copy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cycle {
    pub op: CycleOp,
    /// Run the inverse gates.
    pub adjoint: bool,
}

impl Cycle {
    fn forward(op: CycleOp) -> Self {
        Cycle { op, adjoint: false }
    }

    fn representative(&self) -> GateSpec {
        match self.op {
            CycleOp::Load { .. } => GateSpec::Swap { targets: (0, 1) },
            CycleOp::RouteAddress { .. } | CycleOp::RouteBus { .. } => GateSpec::ControlledSwap {
                control: 0,
                targets: (1, 2),
            },
            CycleOp::BusHadamard => GateSpec::Hadamard { target: 0 },
            CycleOp::Copy => GateSpec::DataCopy {
                control: 0,
                target: 1,
                data: [false; 2],
            },
        }
    }

    /// Name of the gate kind applied in this cycle.
    pub fn gate_name(&self) -> &'static str {
        self.representative().name()
    }

    pub fn duration(&self, times: &GateTimes) -> f64 {
        self.representative().duration(times)
    }

    /// Number of gates applied in parallel in this cycle for a tree of depth `n`.
    pub fn width(&self, n: usize) -> usize {
        match self.op {
            CycleOp::Load { .. } | CycleOp::BusHadamard => 1,
            CycleOp::RouteAddress { level, .. } | CycleOp::RouteBus { level } => 1 << level,
            CycleOp::Copy => 1 << (n - 1),
        }
    }

    /// Concrete gates of this cycle. Copy gates need the database; without
    /// one they carry all-zero data.
    pub fn gates(&self, layout: &QramLayout, db: Option<&ClassicalDatabase>) -> Vec<GateSpec> {
        let n = layout.depth();
        match self.op {
            CycleOp::Load { k } => vec![GateSpec::Swap {
                targets: (layout.address(k - 1), layout.router(k - 1, 0)),
            }],
            CycleOp::RouteAddress { k, level } => (0..1usize << level)
                .map(|i| {
                    let base = i << (k - 1 - level);
                    let half = 1 << (k - 2 - level);
                    GateSpec::ControlledSwap {
                        control: layout.router(level, i),
                        targets: (
                            layout.router(k - 1, base),
                            layout.router(k - 1, base + half),
                        ),
                    }
                })
                .collect(),
            CycleOp::BusHadamard => vec![GateSpec::Hadamard {
                target: layout.bus(),
            }],
            CycleOp::RouteBus { level } => (0..1usize << level)
                .map(|i| {
                    let base = i << (n - 1 - level);
                    let half = 1 << (n - 2 - level);
                    GateSpec::ControlledSwap {
                        control: layout.router(level, i),
                        targets: (layout.slot(base), layout.slot(base + half)),
                    }
                })
                .collect(),
            CycleOp::Copy => (0..layout.n_slots())
                .map(|i| {
                    let data = db.map_or([false; 2], |db| [db.get(2 * i), db.get(2 * i + 1)]);
                    GateSpec::DataCopy {
                        control: layout.router(n - 1, i),
                        target: layout.slot(i),
                        data,
                    }
                })
                .collect(),
        }
    }
}

/// Ordered clock cycles for a tree of fixed depth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub depth: usize,
    pub cycles: Vec<Cycle>,
}

impl Schedule {
    pub fn n_cycles(&self) -> usize {
        self.cycles.len()
    }

    /// Σ over cycles of the cycle duration.
    pub fn wall_time(&self, times: &GateTimes) -> f64 {
        self.cycles.iter().map(|c| c.duration(times)).sum()
    }

    /// Cycles applying the named gate kind; one operation on the active path each.
    pub fn count(&self, gate_name: &str) -> usize {
        self.cycles
            .iter()
            .filter(|c| c.gate_name() == gate_name)
            .count()
    }

    /// Gates of the named kind over the whole tree, counting parallel copies.
    pub fn gate_instances(&self, gate_name: &str) -> usize {
        self.cycles
            .iter()
            .filter(|c| c.gate_name() == gate_name)
            .map(|c| c.width(self.depth))
            .sum()
    }

    /// Reversed cycles with every gate inverted.
    pub fn inverse(&self) -> Schedule {
        Schedule {
            depth: self.depth,
            cycles: self
                .cycles
                .iter()
                .rev()
                .map(|c| Cycle {
                    op: c.op,
                    adjoint: !c.adjoint,
                })
                .collect(),
        }
    }
}

/// For k = 1…n: one SWAP loading address qubit k, then k − 1 routing
/// cycles carrying it down the levels already set.
pub fn schedule_initialization(n: usize) -> Result<Schedule> {
    let layout = QramLayout::new(n)?;
    let mut cycles = Vec::new();
    for k in 1..=layout.depth() {
        cycles.push(Cycle::forward(CycleOp::Load { k }));
        for level in 0..k - 1 {
            cycles.push(Cycle::forward(CycleOp::RouteAddress { k, level }));
        }
    }
    Ok(Schedule { depth: n, cycles })
}

/// Bus preparation, descent through levels 0…n−2, data copy, ascent, bus
/// rotation back, then the initialization run backwards.
pub fn schedule_query(n: usize) -> Result<Schedule> {
    let init = schedule_initialization(n)?;
    let mut cycles = vec![Cycle::forward(CycleOp::BusHadamard)];
    let descent: Vec<Cycle> = (0..n - 1)
        .map(|level| Cycle::forward(CycleOp::RouteBus { level }))
        .collect();
    cycles.extend(descent.iter().copied());
    cycles.push(Cycle::forward(CycleOp::Copy));
    cycles.extend(descent.iter().rev().map(|c| Cycle {
        op: c.op,
        adjoint: true,
    }));
    cycles.push(Cycle {
        op: CycleOp::BusHadamard,
        adjoint: true,
    });
    cycles.extend(init.inverse().cycles);
    Ok(Schedule { depth: n, cycles })
}

/// Wall time of initialization followed by the query.
pub fn total_time(init: &Schedule, query: &Schedule, g1: f64, g2: f64) -> Result<f64> {
    let times = GateTimes::new(g1, g2)?;
    Ok(init.wall_time(&times) + query.wall_time(&times))
}
