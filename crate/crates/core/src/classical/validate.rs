use std::collections::BTreeMap;
use std::fmt;

use crate::formats::{NodeId, RouteSolution, VrpInstance};
use crate::scalar::approx_eq_rel;
use crate::Scalar;

/// Relative tolerance for reported versus recomputed total length.
pub const LENGTH_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    MissingCustomer(NodeId),
    DuplicateCustomer(NodeId),
    UnknownNode(NodeId),
    DepotInRoute { route: usize },
    EmptyRoute { route: usize },
    CapacityExceeded { route: usize, demand: u64, capacity: u64 },
    VehicleCountExceeded { routes: usize, max: u32 },
    LengthMismatch { reported: f64, recomputed: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MissingCustomer(id) => write!(f, "customer {id} is not visited"),
            Self::DuplicateCustomer(id) => write!(f, "customer {id} is visited more than once"),
            Self::UnknownNode(id) => write!(f, "node {id} is not part of the instance"),
            Self::DepotInRoute { route } => write!(f, "route {route} lists the depot"),
            Self::EmptyRoute { route } => write!(f, "route {route} is empty"),
            Self::CapacityExceeded { route, demand, capacity } => {
                write!(f, "route {route} carries {demand}, capacity is {capacity}")
            }
            Self::VehicleCountExceeded { routes, max } => {
                write!(f, "{routes} routes exceed the limit of {max} vehicles")
            }
            Self::LengthMismatch { reported, recomputed } => {
                write!(f, "reported length {reported} differs from recomputed {recomputed}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks a VRP route set against every structural and metric constraint.
pub fn validate_routes<T: Scalar>(instance: &VrpInstance<T>, candidate: &RouteSolution<T>) -> ValidationReport {
    let mut violations = Vec::new();
    let depot = instance.depot();
    let mut visits: BTreeMap<NodeId, usize> = instance.customers().into_iter().map(|c| (c, 0)).collect();
    let mut recomputed = Vec::new();
    let mut metric_ok = true;

    for (r, route) in candidate.routes.iter().enumerate() {
        if route.is_empty() {
            violations.push(Violation::EmptyRoute { route: r });
            continue;
        }
        let mut load = 0u64;
        for &id in route {
            if id == depot {
                violations.push(Violation::DepotInRoute { route: r });
                metric_ok = false;
                continue;
            }
            match visits.get_mut(&id) {
                Some(count) => {
                    *count += 1;
                    if *count == 2 {
                        violations.push(Violation::DuplicateCustomer(id));
                    }
                    load += instance.demand(id).expect("customer known");
                }
                None => {
                    violations.push(Violation::UnknownNode(id));
                    metric_ok = false;
                }
            }
        }
        if load > instance.capacity() {
            violations.push(Violation::CapacityExceeded { route: r, demand: load, capacity: instance.capacity() });
        }
        if metric_ok {
            recomputed.push(route.clone());
        }
    }
    for (&id, &count) in &visits {
        if count == 0 {
            violations.push(Violation::MissingCustomer(id));
        }
    }
    if let Some(max) = instance.max_vehicles() {
        let used = candidate.routes.iter().filter(|r| !r.is_empty()).count();
        if used > max as usize {
            violations.push(Violation::VehicleCountExceeded { routes: used, max });
        }
    }
    if metric_ok {
        let total = super::total_route_length(instance, &recomputed).expect("ids validated");
        if !approx_eq_rel(total, candidate.total_length, T::lit(LENGTH_TOLERANCE)) {
            violations.push(Violation::LengthMismatch {
                reported: candidate.total_length.as_f64(),
                recomputed: total.as_f64(),
            });
        }
    }
    ValidationReport { violations }
}
