from channels.layers import get_channel_layer
from asgiref.sync import async_to_sync
import logging

# Set up logging for WebSocket utilities
logger = logging.getLogger('verifier.websocket')

VALID_MESSAGE_TYPES = ['ping', 'get_status']


def send_matrix_notification(matrix_id, notification_type, notification_data):
    """
    Send a progress notification to every client watching a matrix run.

    Args:
        matrix_id (int): ID of the MatrixRun
        notification_type (str): cell_finished or matrix_finished
        notification_data (dict): Data to send with the notification
    """
    try:
        channel_layer = get_channel_layer()
        if channel_layer is None:
            logger.debug("No channel layer configured; matrix notification dropped")
            return

        async_to_sync(channel_layer.group_send)(
            get_matrix_room_name(matrix_id),
            {
                'type': 'send_notification',
                'notification_type': notification_type,
                'data': notification_data
            }
        )

        logger.info(f"WebSocket notification sent to matrix {matrix_id}: {notification_type}")

    except Exception as e:
        logger.error(f"Failed to send WebSocket notification to matrix {matrix_id}: {str(e)}")


def get_matrix_room_name(matrix_id):
    """
    Get the standardized room name for a matrix run.

    Args:
        matrix_id (int): ID of the MatrixRun

    Returns:
        str: Room name for the matrix
    """
    return f"matrix_{matrix_id}"


def validate_websocket_message(message_data):
    """
    Validate incoming WebSocket message data.

    Args:
        message_data (dict): Message data to validate

    Returns:
        tuple: (is_valid, error_message)
    """
    if not isinstance(message_data, dict):
        return False, "Message data must be a dictionary"

    if 'type' not in message_data:
        return False, "Missing required field: type"

    if message_data['type'] not in VALID_MESSAGE_TYPES:
        return False, f"Invalid message type: {message_data['type']}"

    return True, None
