//! Scripted adapter used by tests.
//!
//! Usage: prisel-mock-adapter <mode> [text]
//!   echo          completion = prompt
//!   fixed TEXT    completion = TEXT for every request
//!   shuffle       answers after a delay that reverses each window of four
//!   malformed     answers with a non-JSON line
//!   unknown-id    answers with an id that was never sent
//!   hang          reads requests and never answers
//!   exit          exits with status 3 on the first request

use std::io::{self, BufRead, Write};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use serde_json::{json, Value};

fn respond(out: &Mutex<io::Stdout>, id: &Value, completion: &str) {
    let mut out = out.lock().unwrap();
    writeln!(out, "{}", json!({ "id": id, "completion": completion })).unwrap();
    out.flush().unwrap();
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mode = args.first().map(String::as_str).unwrap_or("echo");
    let fixed = args.get(1).cloned().unwrap_or_default();
    let out = Arc::new(Mutex::new(io::stdout()));
    let mut workers = Vec::new();

    for line in io::stdin().lock().lines() {
        let line = line.unwrap();
        let req: Value = serde_json::from_str(&line).unwrap();
        let id = req["id"].clone();
        let prompt = req["prompt"].as_str().unwrap_or_default().to_string();
        match mode {
            "echo" => respond(&out, &id, &prompt),
            "fixed" => respond(&out, &id, &fixed),
            "shuffle" => {
                let seq: u64 = id.as_str().and_then(|s| s.parse().ok()).unwrap_or(0);
                let out = Arc::clone(&out);
                workers.push(thread::spawn(move || {
                    thread::sleep(Duration::from_millis(40 * (3 - seq % 4)));
                    respond(&out, &id, &prompt);
                }));
            }
            "malformed" => {
                println!("this is not json");
                io::stdout().flush().unwrap();
            }
            "unknown-id" => respond(&out, &json!("no-such-id"), "x;</s>"),
            "hang" => {}
            "exit" => std::process::exit(3),
            other => {
                eprintln!("unknown mode {other}");
                std::process::exit(2);
            }
        }
    }
    for w in workers {
        w.join().unwrap();
    }
}
