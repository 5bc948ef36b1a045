from hypothesis import settings

# Each example runs a full simulation; keep the property tests short and deadline-free
settings.register_profile("hyperent", max_examples=25, deadline=None)
settings.load_profile("hyperent")
