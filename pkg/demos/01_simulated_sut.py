"""
A first look at the simulated application
=========================================

The demo SUT is a small login-protected desktop app described in JSON.
Executing GUI actions runs guarded procedures; every guard reports which
outcome it took and how far it was from the other one.
"""

# %%
# Load the bundled model and look at the login window.
from mlec.sut import Action, load_demo

sut = load_demo()
state = sut.current_state()
for c in state.components():
    print(f"{c.category:12s} enabled={c.enabled!s:5s} {' / '.join(c.path[-2:])}")

# %%
# The password field and the Login button start disabled; typing a user name
# enables the first, typing a password enables the second.
LOGIN = ("LoginDialog[Login]", "JRootPane", "JLayeredPane", "JPanel")


def do(kind, path, payload=None):
    target = sut.current_state().find(LOGIN + path)
    after = sut.execute(Action(kind, target, payload))
    print(Action(kind, target, payload).describe(), "->", [w.id for w in after.windows])
    return after


do("enter-text", ("JTextField[Username]",), "Mux")
do("enter-text", ("JPasswordField[Password]",), "ReTest")
do("click", ("JPanel[buttons]", "JButton[Login]"))

# %%
# The wrong user name missed ``username == "Max"`` by one edit; that is the
# branch distance the genetic algorithm will try to drive to zero.
for branch in ("login:0:T", "login:0:F"):
    rec = sut.coverage.branches[branch]
    print(branch, "hits", rec.hit_count, "min distance", rec.min_distance)
print(f"branch coverage so far: {sut.coverage.percent():.1f}% of {len(sut.coverage.branches)} branches")
