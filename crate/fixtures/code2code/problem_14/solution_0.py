def group_by_color(flights):
    groups = {}
    for flight in flights:
        groups.setdefault(flight.color, []).append(flight)
    return groups
