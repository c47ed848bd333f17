#![allow(dead_code)]

use std::sync::OnceLock;
use std::thread;
use std::time::{Duration, Instant};

use metasolve_meta::ProblemManager;
use reqwest::blocking::{Client, Response};
use serde_json::Value;

/// Starts a server on an ephemeral port for the rest of the test process.
pub fn spawn_server() -> String {
    let (tx, rx) = std::sync::mpsc::channel();
    thread::spawn(move || {
        let rt = tokio::runtime::Runtime::new().unwrap();
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            tx.send(listener.local_addr().unwrap()).unwrap();
            metasolve_api::serve(listener, ProblemManager::default(), std::future::pending()).await.unwrap();
        });
    });
    format!("http://{}", rx.recv().unwrap())
}

pub fn client() -> Client {
    Client::builder().timeout(Duration::from_secs(60)).build().unwrap()
}

fn openapi() -> &'static Value {
    static DOC: OnceLock<Value> = OnceLock::new();
    DOC.get_or_init(|| serde_json::from_str(metasolve_api::OPENAPI).unwrap())
}

/// Checks `body` against a component of the checked-in description; `"[X]"` means an array of X.
pub fn assert_schema(schema: &str, body: &Value) {
    let mut root = openapi().clone();
    let obj = root.as_object_mut().unwrap();
    match schema.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
        Some(item) => {
            obj.insert("type".into(), "array".into());
            obj.insert("items".into(), serde_json::json!({ "$ref": format!("#/components/schemas/{item}") }));
        }
        None => {
            obj.insert("$ref".into(), format!("#/components/schemas/{schema}").into());
        }
    }
    let validator = jsonschema::validator_for(&root).unwrap();
    let errors: Vec<String> = validator.iter_errors(body).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "{schema}: {errors:?}\n{body:#}");
}

/// Status and JSON body; the body is validated against `schema` on success
/// and against the error schema otherwise.
pub fn checked(resp: Response, schema: &str) -> (u16, Value) {
    let status = resp.status().as_u16();
    let body: Value = resp.json().unwrap();
    assert_schema(if status < 300 { schema } else { "Error" }, &body);
    (status, body)
}

pub fn poll<T>(timeout: Duration, mut f: impl FnMut() -> Option<T>) -> T {
    let deadline = Instant::now() + timeout;
    loop {
        if let Some(v) = f() {
            return v;
        }
        assert!(Instant::now() < deadline, "timed out polling");
        thread::sleep(Duration::from_millis(20));
    }
}

pub const VRP: &str = "NAME: v\nTYPE: CVRP\nDIMENSION: 6\nEDGE_WEIGHT_TYPE: EUC_2D\nCAPACITY: 3\nVEHICLES: 2\n\
NODE_COORD_SECTION\n1 50 50\n2 80 60\n3 90 40\n4 70 20\n5 20 30\n6 10 70\n\
DEMAND_SECTION\n1 0\n2 1\n3 1\n4 1\n5 1\n6 1\nDEPOT_SECTION\n1\n-1\nEOF\n";

pub const SQUARE: &str =
    "NAME: sq\nTYPE: TSP\nDIMENSION: 4\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 1 0\n3 1 1\n4 0 1\nEOF\n";
