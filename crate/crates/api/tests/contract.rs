mod common;

use std::collections::BTreeSet;

use common::*;
use metasolve_api::ROUTES;
use serde_json::{json, Value};

fn manifest() -> BTreeSet<(String, String)> {
    let text = include_str!("../contract/routes.txt");
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let (m, p) = l.split_once(' ').unwrap();
            (m.to_string(), p.trim().to_string())
        })
        .collect()
}

#[test]
fn route_table_matches_manifest() {
    let table: BTreeSet<(String, String)> = ROUTES.iter().map(|(m, p)| (m.to_string(), p.to_string())).collect();
    assert_eq!(table.len(), ROUTES.len());
    assert_eq!(table, manifest());
}

#[test]
fn openapi_describes_exactly_the_manifest() {
    let doc: Value = serde_json::from_str(metasolve_api::OPENAPI).unwrap();
    let mut described = BTreeSet::new();
    for (path, item) in doc["paths"].as_object().unwrap() {
        for method in item.as_object().unwrap().keys().filter(|k| *k != "parameters") {
            described.insert((method.to_uppercase(), path.clone()));
        }
    }
    assert_eq!(described, manifest());

    let base = spawn_server();
    let served: Value = client().get(format!("{base}/openapi")).send().unwrap().json().unwrap();
    assert_eq!(served, doc);
}

#[test]
fn every_manifest_route_is_served_and_nothing_else() {
    let base = spawn_server();
    let c = client();
    let id = uuid_like();
    for (method, path) in manifest() {
        let url = format!(
            "{base}{}",
            path.replace("{problemType}", "tsp")
                .replace("{problemId}", &id)
                .replace("{solverId}", "tsp.classical.held-karp")
        );
        let req = c.request(method.parse().unwrap(), &url).header("content-type", "application/json").body("{}");
        let resp = req.send().unwrap();
        assert_ne!(resp.status().as_u16(), 405, "{method} {path}");
        let body: Value = resp.json().unwrap_or(Value::Null);
        assert_ne!(body["error"], "no such endpoint", "{method} {path}");
    }
    for (method, path) in
        [("DELETE", "/problems/tsp"), ("GET", "/problems"), ("PUT", "/solvers/tsp"), ("GET", "/problem/tsp")]
    {
        let resp = c.request(method.parse().unwrap(), format!("{base}{path}")).send().unwrap();
        assert!(matches!(resp.status().as_u16(), 404 | 405), "{method} {path}");
    }
}

fn uuid_like() -> String {
    "6f1c1a52-8d2e-4b8e-9a53-1b8c55f3e0aa".into()
}

#[test]
fn status_mapping() {
    let base = spawn_server();
    let c = client();

    let (s, body) = checked(c.get(format!("{base}/problems/tsp")).send().unwrap(), "[ProblemSummary]");
    assert_eq!((s, body), (200, json!([])));
    assert_eq!(checked(c.get(format!("{base}/problems/bogus")).send().unwrap(), "").0, 404);

    let post = |ty: &str, body: Value| c.post(format!("{base}/problems/{ty}")).json(&body).send().unwrap();
    let resp = post("tsp", json!({"typeId": "tsp", "input": SQUARE}));
    let location = resp.headers()["location"].to_str().unwrap().to_string();
    let (s, created) = checked(resp, "Problem");
    assert_eq!(s, 201);
    assert_eq!(created["state"], "NEEDS_CONFIGURATION");
    assert_eq!(location, format!("/problems/tsp/{}", created["id"].as_str().unwrap()));
    assert_eq!(checked(post("tsp", json!({"typeId": "knapsack", "input": SQUARE})), "").0, 400);
    assert_eq!(checked(post("bogus", json!({"typeId": "bogus", "input": ""})), "").0, 404);
    assert_eq!(checked(post("tsp", json!({"typeId": "tsp"})), "").0, 400);

    let (s, list) = checked(c.get(format!("{base}/problems/tsp")).send().unwrap(), "[ProblemSummary]");
    assert_eq!(s, 200);
    assert_eq!(list.as_array().unwrap().len(), 1);

    let (s, got) = checked(c.get(format!("{base}{location}")).send().unwrap(), "Problem");
    assert_eq!((s, &got), (200, &created));
    assert_eq!(checked(c.get(format!("{base}/problems/tsp/{}", uuid_like())).send().unwrap(), "").0, 404);
    assert_eq!(checked(c.get(format!("{base}/problems/tsp/not-a-uuid")).send().unwrap(), "").0, 404);
    let id = created["id"].as_str().unwrap();
    assert_eq!(checked(c.get(format!("{base}/problems/knapsack/{id}")).send().unwrap(), "").0, 404);

    let patch = |body: &str| {
        c.patch(format!("{base}{location}"))
            .header("content-type", "application/json")
            .body(body.to_string())
            .send()
            .unwrap()
    };
    assert_eq!(checked(patch(r#"{"state": "SOLVED"}"#), "").0, 400);
    assert_eq!(checked(patch(r#"{"state": "SOLVING"}"#), "").0, 400, "no solver yet");
    assert_eq!(checked(patch(r#"{"solverID": "tsp.classical.held-karp"}"#), "").0, 400);
    assert_eq!(checked(patch(r#"{"solverId": 7}"#), "").0, 400);
    assert_eq!(checked(patch("{not json"), "").0, 400);
    assert_eq!(checked(patch(r#"{"solverId": "knapsack.classical.dp"}"#), "").0, 400);
    assert_eq!(checked(patch(r#"{"solverId": "tsp.classical.two-opt", "solverSettings": {"seed": "x"}}"#), "").0, 400);
    assert_eq!(checked(patch(r#"{"solverId": "no.such.solver"}"#), "").0, 404);

    let (s, b) = checked(c.get(format!("{base}{location}/bound")).send().unwrap(), "BoundReport");
    assert_eq!((s, &b["boundType"], &b["value"]), (200, &json!("LOWER"), &json!(4.0)));
    assert_eq!(checked(c.get(format!("{base}{location}/bound/compare")).send().unwrap(), "").0, 409);

    let (s, p) = checked(patch(r#"{"solverId": "tsp.classical.held-karp", "state": "SOLVING"}"#), "Problem");
    assert_eq!((s, &p["state"]), (200, &json!("SOLVING")));
    let solved = poll(std::time::Duration::from_secs(10), || {
        let p: Value = c.get(format!("{base}{location}")).send().unwrap().json().unwrap();
        (p["state"] == "SOLVED").then_some(p)
    });
    assert_schema("Problem", &solved);
    assert_eq!(solved["solution"]["status"], "SOLVED");
    assert_eq!(checked(patch(r#"{"input": "x"}"#), "").0, 409);

    let (s, cmp) = checked(c.get(format!("{base}{location}/bound/compare")).send().unwrap(), "BoundComparison");
    assert_eq!(s, 200);
    assert_eq!(cmp["absoluteGap"], json!(0.0));
    let (sv, bv) = (cmp["solutionValue"].as_f64().unwrap(), cmp["bound"]["value"].as_f64().unwrap());
    assert_eq!(cmp["absoluteGap"].as_f64().unwrap(), (sv - bv).abs());

    let resp = post("knapsack", json!({"typeId": "knapsack", "input": "not a knapsack"}));
    let garbage = resp.headers()["location"].to_str().unwrap().to_string();
    assert_eq!(checked(c.get(format!("{base}{garbage}/bound")).send().unwrap(), "").0, 422);
}

#[test]
fn knapsack_and_qubo_bounds() {
    let base = spawn_server();
    let c = client();
    let create = |ty: &str, input: &str| -> String {
        let resp = c.post(format!("{base}/problems/{ty}")).json(&json!({"typeId": ty, "input": input})).send().unwrap();
        resp.headers()["location"].to_str().unwrap().to_string()
    };
    let k = create("knapsack", "capacity 100\n1 2 3\n2 3 4\n3 5 6\n");
    let (_, b) = checked(c.get(format!("{base}{k}/bound")).send().unwrap(), "BoundReport");
    assert_eq!((&b["boundType"], b["value"].as_f64().unwrap()), (&json!("UPPER"), 13.0));
    let q = create("qubo", "n 2\nc 1.5\n0 0 2\n0 1 3\n1 1 0.5\n");
    let (_, b) = checked(c.get(format!("{base}{q}/bound")).send().unwrap(), "BoundReport");
    assert_eq!(b["value"].as_f64().unwrap(), 1.5);
}

#[test]
fn solver_discovery() {
    let base = spawn_server();
    let c = client();
    let (s, tsp) = checked(c.get(format!("{base}/solvers/tsp")).send().unwrap(), "[SolverDescriptor]");
    assert_eq!(s, 200);
    let ids: Vec<&str> = tsp.as_array().unwrap().iter().map(|d| d["solverId"].as_str().unwrap()).collect();
    assert!(ids.contains(&"tsp.qubo.transformation"), "{ids:?}");
    assert_eq!(checked(c.get(format!("{base}/solvers/bogus")).send().unwrap(), "").0, 404);

    let sub = |ty: &str, id: &str| {
        checked(c.get(format!("{base}/solvers/{ty}/{id}/sub-routines")).send().unwrap(), "TypeIdList")
    };
    assert_eq!(sub("cluster-vrp", "vrp.clusterer.two-phase"), (200, json!(["tsp"])));
    assert_eq!(sub("tsp", "tsp.qubo.transformation"), (200, json!(["qubo"])));
    assert_eq!(sub("qubo", "qubo.quantum.sampler"), (200, json!(["quantum-circuit-processing"])));
    assert_eq!(sub("tsp", "tsp.classical.held-karp"), (200, json!([])));
    assert_eq!(sub("tsp", "qubo.quantum.sampler").0, 404);
    assert_eq!(sub("tsp", "nope").0, 404);

    let (s, settings) = checked(
        c.get(format!("{base}/solvers/qubo/qubo.quantum.sampler/settings")).send().unwrap(),
        "[SettingDescriptor]",
    );
    assert_eq!(s, 200);
    let find = |n: &str| settings.as_array().unwrap().iter().find(|d| d["name"] == n).cloned().unwrap();
    assert_eq!(find("shots")["kind"], "INTEGER");
    assert_eq!(find("seed")["kind"], "INTEGER");
    let backend = find("backend");
    assert_eq!(backend["kind"], "CHOICE");
    assert!(backend["choices"].as_array().unwrap().len() >= 2);
}

#[test]
fn cors_is_permissive() {
    let base = spawn_server();
    let resp = client()
        .request(reqwest::Method::OPTIONS, format!("{base}/problems/tsp"))
        .header("origin", "http://localhost:5173")
        .header("access-control-request-method", "PATCH")
        .send()
        .unwrap();
    assert!(resp.status().is_success());
    assert_eq!(resp.headers()["access-control-allow-origin"], "*");
}
