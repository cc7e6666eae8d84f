from hypothesis import settings

settings.register_profile("default", deadline=None)
settings.load_profile("default")

# acceptance verdicts, one "criterion N: PASS|FAIL ..." line each
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])
