mod common;

use std::io::{Read, Write};
use std::net::TcpStream;
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use common::{echo_registry, goal_strategy};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use termweb::actmod::wire::{read_frame, write_frame, MAX_FRAME};
use termweb::actmod::{
    call_remote, run_name_server, serve, ActiveModule, ActmodError, CallOutcome, Connection, FileDirectory,
    FixedAddress, GoalCall, Locator, NameServer, NoPublish, Publisher, Registry, WebDirectory,
};
use termweb::phone::{phone_registry, PhoneBackend, MODULE};
use termweb::term::Value;
use termweb::url::url_info;
use termweb_fixture::{Fixture, Route};

const T: Duration = Duration::from_secs(10);

#[test]
fn remote_outcomes_equal_local_outcomes() {
    let local = echo_registry();
    let server = serve("echo", Arc::new(echo_registry()), &NoPublish).unwrap();
    let conn = std::sync::Mutex::new(Connection::open(server.addr(), T).unwrap());
    let mut runner = TestRunner::new(Config::with_cases(300));
    runner
        .run(&goal_strategy(), |goal| {
            prop_assert_eq!(conn.lock().unwrap().call(&goal).unwrap(), local.call(&goal));
            Ok(())
        })
        .unwrap();

    let phone_local = phone_registry();
    let phone = serve(MODULE, Arc::new(phone_registry()), &NoPublish).unwrap();
    for name in ["daniel", "manuel", "sacha", "zed", "", "  "] {
        let goal = GoalCall::new("response", vec![Value::str(name), Value::Placeholder]);
        assert_eq!(call_remote(phone.addr(), &goal, T).unwrap(), phone_local.call(&goal));
    }
}

#[test]
fn concurrent_clients_get_their_own_answers() {
    let server = serve("echo", Arc::new(echo_registry()), &NoPublish).unwrap();
    let addr = server.addr().clone();
    let clients: Vec<_> = (0..8)
        .map(|c| {
            let addr = addr.clone();
            thread::spawn(move || {
                let mut conn = Connection::open(&addr, T).unwrap();
                for i in 0..50 {
                    let args = vec![Value::Int(c), Value::Int(i)];
                    let goal = GoalCall::new("swap", args);
                    let outcome = if i % 5 == 0 { call_remote(&addr, &goal, T) } else { conn.call(&goal) };
                    assert_eq!(outcome.unwrap(), CallOutcome::Success(vec![Value::Int(i), Value::Int(c)]));
                }
            })
        })
        .collect();
    for c in clients {
        c.join().unwrap();
    }
}

#[test]
fn updates_are_serialized() {
    let counter = Registry::new(0i64)
        .update("add", 1, |n, a| {
            let Value::Int(k) = a[0] else { return CallOutcome::Failure };
            *n += k;
            CallOutcome::Success(a.to_vec())
        })
        .query("get", 1, |n, _| CallOutcome::Success(vec![Value::Int(*n)]));
    let server = serve("counter", Arc::new(counter), &NoPublish).unwrap();
    let addr = server.addr().clone();
    let workers: Vec<_> = (0..8)
        .map(|_| {
            let addr = addr.clone();
            thread::spawn(move || {
                let mut conn = Connection::open(&addr, T).unwrap();
                for _ in 0..50 {
                    conn.call(&GoalCall::new("add", vec![Value::Int(1)])).unwrap();
                }
            })
        })
        .collect();
    for w in workers {
        w.join().unwrap();
    }
    let total = call_remote(&addr, &GoalCall::new("get", vec![Value::Placeholder]), T).unwrap();
    assert_eq!(total, CallOutcome::Success(vec![Value::Int(400)]));
}

fn ask(module: &ActiveModule, name: &str) -> String {
    module.response(name).unwrap().to_text()
}

#[test]
fn file_directory_discovery_and_restart() {
    let dir = tempfile::tempdir().unwrap();
    let directory = FileDirectory::new(dir.path());
    let server = serve(MODULE, Arc::new(phone_registry()), &directory).unwrap();
    let first = server.addr().clone();
    let client = ActiveModule::import(MODULE, &[("response", 2)], Arc::new(FileDirectory::new(dir.path())));
    assert!(ask(&client, "daniel").contains("336-7448"));
    assert!(matches!(
        client.call("add_phone", vec![Value::str("x"), Value::str("y")]),
        Err(ActmodError::NotImported { .. })
    ));

    server.shutdown();
    // hold the old port so the restarted server must move
    let _old = std::net::TcpListener::bind(("127.0.0.1", first.port));
    let server = serve(MODULE, Arc::new(phone_registry()), &directory).unwrap();
    assert_ne!(server.addr(), &first);
    assert!(ask(&client, "sacha").contains("543-5316"));

    let missing = ActiveModule::import("absent", &[("response", 2)], Arc::new(FileDirectory::new(dir.path())));
    assert!(matches!(missing.response("x"), Err(termweb::phone::PhoneError::Actmod(ActmodError::LocateFailed { .. }))));
}

#[test]
fn name_server_discovery() {
    let ns = run_name_server("127.0.0.1:0").unwrap();
    let registry = NameServer::new(ns.addr().clone());
    assert!(matches!(registry.locate(MODULE), Err(ActmodError::LocateFailed { .. })));
    let server = serve(MODULE, Arc::new(phone_registry()), &registry).unwrap();
    assert_eq!(registry.locate(MODULE).unwrap(), *server.addr());
    let client = ActiveModule::import(MODULE, &[("response", 2)], Arc::new(NameServer::new(ns.addr().clone())));
    assert!(ask(&client, "manuel").contains("336-7435"));
}

#[test]
fn web_directory_discovery() {
    let dir = tempfile::tempdir().unwrap();
    let site = Fixture::start(Vec::<(String, Route)>::new());
    let base = url_info(&site.url("/modules/")).unwrap();
    let web = WebDirectory::new(dir.path(), base);
    let server = serve(MODULE, Arc::new(phone_registry()), &web).unwrap();
    let text = std::fs::read_to_string(dir.path().join("phone_db.addr")).unwrap();
    site.set_route("/modules/phone_db.addr", Route::ok("text/plain", text));
    assert_eq!(web.locate(MODULE).unwrap(), *server.addr());
    assert!(matches!(web.locate("other"), Err(ActmodError::LocateFailed { .. })));
    let client = ActiveModule::import(MODULE, &[("response", 2)], Arc::new(web));
    assert!(ask(&client, "zed").contains("No telephone number"));
}

#[test]
fn fixed_address_and_publish_failure() {
    let server = serve(MODULE, Arc::new(phone_registry()), &NoPublish).unwrap();
    let client = ActiveModule::import(MODULE, &[("response", 2)], Arc::new(FixedAddress(server.addr().clone())));
    assert!(ask(&client, "").contains("You have to provide a name."));
    let bad = FileDirectory::new("/nonexistent/dir");
    assert!(matches!(
        bad.publish(MODULE, server.addr()),
        Err(ActmodError::PublishFailed(_))
    ));
    assert!(matches!(
        serve(MODULE, Arc::new(Registry::new(())), &NoPublish),
        Err(ActmodError::EmptyRegistry)
    ));
}

fn raw(stream: &mut TcpStream, payload: &[u8]) {
    let mut buf = (payload.len() as u32).to_be_bytes().to_vec();
    buf.extend_from_slice(payload);
    stream.write_all(&buf).unwrap();
}

fn reply(stream: &mut TcpStream) -> CallOutcome {
    CallOutcome::from_value(&read_frame(stream).unwrap().unwrap()).unwrap()
}

#[test]
fn server_survives_malformed_frames() {
    let server = serve("echo", Arc::new(echo_registry()), &NoPublish).unwrap();
    let mut s = TcpStream::connect(server.local_addr()).unwrap();
    s.set_read_timeout(Some(T)).unwrap();
    let ok = |s: &mut TcpStream| {
        write_frame(s, &GoalCall::new("echo", vec![Value::Int(7)]).to_value()).unwrap();
        assert_eq!(reply(s), CallOutcome::Success(vec![Value::Int(7)]));
    };

    raw(&mut s, b"f(");
    assert!(matches!(reply(&mut s), CallOutcome::RemoteError(_)));
    raw(&mut s, b"\xff\xfe");
    assert!(matches!(reply(&mut s), CallOutcome::RemoteError(_)));
    raw(&mut s, b"[1,2]");
    assert!(matches!(reply(&mut s), CallOutcome::RemoteError(_)));
    ok(&mut s);

    // an oversized header ends the connection but not the server
    s.write_all(&((MAX_FRAME + 1) as u32).to_be_bytes()).unwrap();
    assert!(matches!(reply(&mut s), CallOutcome::RemoteError(_)));
    let mut rest = Vec::new();
    assert_eq!(s.read_to_end(&mut rest).unwrap(), 0);

    // a frame cut short by the client
    let mut t = TcpStream::connect(server.local_addr()).unwrap();
    t.write_all(&[0, 0, 0, 50, b'f']).unwrap();
    drop(t);

    let mut u = TcpStream::connect(server.local_addr()).unwrap();
    u.set_read_timeout(Some(T)).unwrap();
    ok(&mut u);
    let boom = call_remote(server.addr(), &GoalCall::new("boom", vec![]), T).unwrap();
    assert!(matches!(boom, CallOutcome::RemoteError(_)));
    ok(&mut u);
}

#[test]
fn unreachable_module() {
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let addr = termweb::actmod::ModuleAddress::new("127.0.0.1", port);
    assert!(matches!(
        call_remote(&addr, &GoalCall::new("x", vec![]), T),
        Err(ActmodError::ConnectFailed { .. })
    ));
}
