mod common;

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::process::{Command, Stdio};

use common::corpus;

fn request(addr: &str, raw: &str) -> String {
    let mut s = TcpStream::connect(addr).unwrap();
    s.write_all(raw.as_bytes()).unwrap();
    let mut out = String::new();
    s.read_to_string(&mut out).unwrap();
    out
}

#[test]
fn serves_over_tcp() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_argdec"))
        .args(["serve", &corpus("alfa_modelA.kb"), "--port", "0"])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).unwrap();
    let addr = line.trim().strip_prefix("listening on http://").unwrap().to_string();

    let health = request(&addr, "GET /health HTTP/1.1\r\nHost: x\r\nConnection: close\r\n\r\n");
    let body = "{\"statement\": \"prop how_chairman_reacts.\", \"revision\": 0}";
    let post = request(
        &addr,
        &format!(
            "POST /statements HTTP/1.1\r\nHost: x\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
            body.len()
        ),
    );
    child.kill().unwrap();
    let _ = child.wait();

    assert!(health.starts_with("HTTP/1.1 200"), "{health}");
    assert!(health.to_lowercase().contains("x-revision: 0"), "{health}");
    assert!(health.contains("\"status\":\"ok\""), "{health}");
    assert!(post.starts_with("HTTP/1.1 200"), "{post}");
    assert!(post.to_lowercase().contains("x-revision: 1"), "{post}");
}

#[test]
fn busy_port_is_a_usage_error() {
    let l = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = l.local_addr().unwrap().port().to_string();
    let out = Command::new(env!("CARGO_BIN_EXE_argdec"))
        .args(["serve", &corpus("alfa_modelA.kb"), "--port", &port])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--port"));
}
