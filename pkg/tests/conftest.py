ACCEPTANCE_LINES = []


def record_acceptance(number, title, ok, details):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {title}: {details}"
    ACCEPTANCE_LINES.append((number, line))
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
