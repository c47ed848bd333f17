//! The request sequence a client goes through to solve a VRP by hand:
//! create, pick the clusterer, configure every TSP child, poll.

mod common;

use std::time::Duration;

use common::*;
use metasolve_core::classical::validate_routes;
use metasolve_core::formats::{parse_routes, parse_vrp};
use reqwest::blocking::Client;
use serde_json::{json, Value};

fn get(c: &Client, url: &str) -> Value {
    let (s, body) = checked(c.get(url).send().unwrap(), "Problem");
    assert_eq!(s, 200, "{body}");
    body
}

fn child_ids(p: &Value) -> Vec<String> {
    p["subProblems"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|b| b["childProblemIds"].as_array().unwrap().iter().map(|id| id.as_str().unwrap().to_string()))
        .collect()
}

fn replay(child_patch: Value) -> Value {
    let base = spawn_server();
    let c = client();
    let resp = c
        .post(format!("{base}/problems/cluster-vrp"))
        .json(&json!({"typeId": "cluster-vrp", "input": VRP}))
        .send()
        .unwrap();
    let location = format!("{base}{}", resp.headers()["location"].to_str().unwrap());
    let (s, _) = checked(resp, "Problem");
    assert_eq!(s, 201);

    let (s, started) = checked(
        c.patch(&location).json(&json!({"solverId": "vrp.clusterer.two-phase", "state": "SOLVING"})).send().unwrap(),
        "Problem",
    );
    assert_eq!((s, &started["state"]), (200, &json!("SOLVING")));

    let children = poll(Duration::from_secs(10), || {
        let ids = child_ids(&get(&c, &location));
        (!ids.is_empty()).then_some(ids)
    });
    assert_eq!(get(&c, &location)["subProblems"][0]["subRoutineTypeId"], "tsp");
    for id in &children {
        let child = get(&c, &format!("{base}/problems/tsp/{id}"));
        assert_eq!(child["state"], "NEEDS_CONFIGURATION");
        let (s, body) =
            checked(c.patch(format!("{base}/problems/tsp/{id}")).json(&child_patch).send().unwrap(), "Problem");
        assert_eq!((s, &body["state"]), (200, &json!("SOLVING")), "{body}");
    }

    let done = poll(Duration::from_secs(60), || {
        let p = get(&c, &location);
        (p["state"] == "SOLVED").then_some(p)
    });
    for id in &children {
        let child = get(&c, &format!("{base}/problems/tsp/{id}"));
        assert_eq!((&child["state"], &child["solution"]["status"]), (&json!("SOLVED"), &json!("SOLVED")));
        assert_eq!(child["parentId"], done["id"]);
    }
    done
}

fn assert_valid_routes(done: &Value) {
    let solution = &done["solution"];
    assert_eq!(solution["status"], "SOLVED", "{solution}");
    let instance = parse_vrp::<f64>(VRP).unwrap();
    let routes = parse_routes::<f64>(solution["result"].as_str().unwrap()).unwrap();
    let report = validate_routes(&instance, &routes);
    assert!(report.is_valid(), "{report:?}");
    assert!((solution["objectiveValue"].as_f64().unwrap() - routes.total_length).abs() < 1e-9);
}

#[test]
fn classical_children() {
    let done = replay(json!({"solverId": "tsp.classical.held-karp", "state": "SOLVING"}));
    assert_valid_routes(&done);
}

#[test]
fn quantum_children() {
    let done = replay(json!({
        "solverId": "tsp.qubo.transformation",
        "solverSettings": {"childSolver": "qubo.quantum.sampler[seed=11]"},
        "state": "SOLVING"
    }));
    assert_valid_routes(&done);
}
