import math
from collections import defaultdict


def merge_cards(left, right):
    """Merge two lists of cards keeping the larger level per code. See https://docs.example.com/cards for details.

    Extra notes.
    """
    # walk the cards once
    merged = {}
    for card in left + right:
        current = merged.get(card.code)
        if current is None or card.level > current.level:
            merged[card.code] = card
    return list(merged.values())


def group_tasks_by_region(tasks):
    """Group the tasks by their region.

    :param tasks: the tasks to inspect
    """
    groups = {}
    for task in tasks:
        groups.setdefault(task.region, []).append(task)
    return groups


def index_orders_by_owner(orders):
    """Build a mapping from owner to order."""
    index = {}
    for order in orders:
        index[order.owner] = order
    return index


def filter_teams_by_priority(teams, threshold):
    """Select teams whose priority exceeds the threshold."""
    selected = []
    for team in teams:
        if team.priority > threshold:
            selected.append(team)
    return selected


def distinct_colors(events):
    """Collect the distinct color values of the events."""
    seen = set()
    result = []
    for event in events:
        if event.color not in seen:
            seen.add(event.color)
            result.append(event.color)
    return result


def distinct_titles(users):
    """Collect the distinct title values of the users.

    :param users: the users to inspect
    """
    seen = set()
    result = []
    for user in users:
        if user.title not in seen:
            seen.add(user.title)
            result.append(user.title)
    return result


def average_level(servers):
    """Return the average level across all servers.

    :param servers: the servers to inspect
    """
    # walk the servers once
    if not servers:
        return 0.0
    total = sum(server.level for server in servers)
    return total / len(servers)


def rank_records(records, weight=1.0):
    """Rank records using a custom size key."""
    def key(record):
        return record.size * weight
    ranked = sorted(records, key=key)
    return ranked
